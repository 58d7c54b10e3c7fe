"""Finite categories, nerves, finite dg-categories and their modules.

A dg-category here has finitely many objects, hom complexes that are
ChainComplexes, composition maps ``comp(a, b, c) : hom(b,c) ⊗ hom(a,b) -> hom(a,c)``
and unit maps ``Z[0] -> hom(a,a)``. Presheaves (weights) act on the right,
``W(c) ⊗ hom(c',c) -> W(c')``; diagrams act on the left,
``hom(c,c') ⊗ D(c) -> D(c')``.
"""

from itertools import product

import numpy as np

from . import intmat as im
from .chain import (ChainComplex, ChainMap, DirectSum, Verdict, OK, apply_local, assemble,
                    distribute, is_cofibration, tensor_maps, tensor_product, validate_complex,
                    validate_map, _same)

UNIT = ChainComplex.sphere(0)


# ---------------------------------------------------------------------------
# ordinary finite categories


class FiniteCategory:
    """Objects, named morphisms and a composition table.

    ``morphisms`` maps a name to ``(source, target)``; ``compose`` maps
    ``(g, f)`` to the name of ``g ∘ f``. Identities are named ``id_<obj>``
    unless given, and their compositions are filled in automatically.
    """

    def __init__(self, objects, morphisms=None, compose=None, identities=None):
        self.objects = list(objects)
        self.identities = dict(identities or {})
        self.morphisms = {}
        for x in self.objects:
            name = self.identities.setdefault(x, "id_%s" % (x,))
            self.morphisms[name] = (x, x)
        for name, (s, t) in dict(morphisms or {}).items():
            if name not in self.morphisms:
                self.morphisms[name] = (s, t)
        self.table = dict(compose or {})
        for f, (s, t) in self.morphisms.items():
            self.table.setdefault((f, self.identities[s]), f)
            self.table.setdefault((self.identities[t], f), f)
        self._hom = {}
        for f, (s, t) in self.morphisms.items():
            self._hom.setdefault((s, t), []).append(f)

    def hom(self, a, b):
        return self._hom.get((a, b), [])

    def source(self, f):
        return self.morphisms[f][0]

    def target(self, f):
        return self.morphisms[f][1]

    def compose(self, g, f):
        return self.table[(g, f)]

    def is_identity(self, f):
        s, t = self.morphisms[f]
        return s == t and self.identities[s] == f

    def nonidentity(self):
        return [f for f in self.morphisms if not self.is_identity(f)]

    def is_loop_free(self):
        for f, (s, t) in self.morphisms.items():
            if s == t and not self.is_identity(f):
                return False
        for a in self.objects:
            for b in self.objects:
                if a != b and self.hom(a, b) and self.hom(b, a):
                    return False
        # longer cycles
        order = self._topological_order()
        return order is not None

    def _topological_order(self):
        succ = {x: {self.target(f) for f in self.nonidentity() if self.source(f) == x} for x in self.objects}
        indeg = {x: 0 for x in self.objects}
        for x in self.objects:
            for y in succ[x]:
                indeg[y] += 1
        queue = [x for x in self.objects if indeg[x] == 0]
        out = []
        while queue:
            x = queue.pop(0)
            out.append(x)
            for y in sorted(succ[x], key=self.objects.index):
                indeg[y] -= 1
                if indeg[y] == 0:
                    queue.append(y)
        return out if len(out) == len(self.objects) else None

    def initial_objects(self):
        return [x for x in self.objects if all(len(self.hom(x, y)) == 1 for y in self.objects)]

    def terminal_objects(self):
        return [x for x in self.objects if all(len(self.hom(y, x)) == 1 for y in self.objects)]

    # constructors
    @classmethod
    def discrete(cls, objects):
        return cls(objects)

    @classmethod
    def arrow(cls):
        return cls.poset([0, 1], [(0, 1)])

    @classmethod
    def span(cls):
        """b <- a -> c."""
        return cls.poset(["a", "b", "c"], [("a", "b"), ("a", "c")])

    @classmethod
    def poset(cls, elements, relations):
        """Poset category from generating relations x <= y (transitively closed)."""
        elements = list(elements)
        leq = {(x, x) for x in elements} | {tuple(r) for r in relations}
        changed = True
        while changed:
            changed = False
            for (a, b) in list(leq):
                for (c, d) in list(leq):
                    if b == c and (a, d) not in leq:
                        leq.add((a, d))
                        changed = True
        morph, table = {}, {}
        name = {}
        for a in elements:
            for b in elements:
                if (a, b) in leq and a != b:
                    name[(a, b)] = "%s<%s" % (a, b)
                    morph[name[(a, b)]] = (a, b)
        ident = {x: "id_%s" % (x,) for x in elements}
        for (a, b), f in name.items():
            for c in elements:
                if (b, c) in leq:
                    g = ident[b] if b == c else name[(b, c)]
                    h = name[(a, c)] if a != c else ident[a]
                    table[(g, f)] = h
        return cls(elements, morph, table, ident)

    @classmethod
    def free_on_quiver(cls, objects, edges):
        """Free category (paths) on an acyclic quiver; ``edges`` are (name, s, t)."""
        morph = {}
        paths = {}  # name -> tuple of edge names, first applied first
        for e, s, t in edges:
            morph[e] = (s, t)
            paths[e] = (e,)
        frontier = list(paths)
        while frontier:
            new = []
            for p in frontier:
                for e, s, t in edges:
                    if s == morph[p][1]:
                        q = paths[p] + (e,)
                        nm = ".".join(q)
                        if nm not in morph:
                            morph[nm] = (morph[p][0], t)
                            paths[nm] = q
                            new.append(nm)
                            if len(q) > len(objects) + 1:
                                raise ValueError("quiver has a cycle")
            frontier = new
        byp = {v: k for k, v in paths.items()}
        table = {}
        for f in paths:
            for g in paths:
                if morph[f][1] == morph[g][0]:
                    table[(g, f)] = byp[paths[f] + paths[g]]
        return cls(objects, morph, table)


def validate_category(I):
    for f, (s, t) in I.morphisms.items():
        if s not in I.objects or t not in I.objects:
            return Verdict(False, f, "morphism %s has unknown endpoints" % (f,))
    for (g, f), h in I.table.items():
        if I.target(f) != I.source(g) or I.morphisms.get(h) != (I.source(f), I.target(g)):
            return Verdict(False, (g, f), "composite %s∘%s = %s has wrong type" % (g, f, h))
    for f in I.morphisms:
        for g in I.morphisms:
            if I.target(f) == I.source(g) and (g, f) not in I.table:
                return Verdict(False, (g, f), "composite %s∘%s missing" % (g, f))
    for f in I.morphisms:
        for g in I.morphisms:
            if I.target(f) != I.source(g):
                continue
            for h in I.morphisms:
                if I.target(g) != I.source(h):
                    continue
                if I.compose(h, I.compose(g, f)) != I.compose(I.compose(h, g), f):
                    return Verdict(False, (h, g, f), "associativity fails for (%s, %s, %s)" % (h, g, f))
    for x in I.objects:
        i = I.identities[x]
        for f in I.morphisms:
            if I.source(f) == x and I.compose(f, i) != f:
                return Verdict(False, (f, i), "right unit law fails")
            if I.target(f) == x and I.compose(i, f) != f:
                return Verdict(False, (i, f), "left unit law fails")
    return OK


def under_category(i, I):
    """i ↓ I: objects are morphisms i -> x, morphisms h with h ∘ f = g."""
    objs = [f for f in I.morphisms if I.source(f) == i]
    morph, table, ident = {}, {}, {}
    for f in objs:
        for g in objs:
            for h in I.hom(I.target(f), I.target(g)):
                if I.compose(h, f) == g:
                    morph[(h, f)] = (f, g)
    for f in objs:
        ident[f] = (I.identities[I.target(f)], f)
    for (h1, f), (_, g) in morph.items():
        for (h2, g2), (_, k) in morph.items():
            if g2 == g:
                table[((h2, g), (h1, f))] = (I.compose(h2, h1), f)
    return FiniteCategory(objs, morph, table, ident)


# ---------------------------------------------------------------------------
# simplicial sets (nondegenerate data only)


class SimplicialSet:
    """Nondegenerate simplices by dimension with face incidences.

    ``faces[n][k]`` lists, for simplex k of dimension n, the index of each
    face d_0..d_n in dimension n-1, or None where the face is degenerate.
    ``truncated`` marks a dimension cap that cut off nonzero simplices.
    """

    def __init__(self, simplices, faces, truncated=False):
        self.simplices = [list(s) for s in simplices]
        self.faces = [list(f) for f in faces]
        self.truncated = truncated

    @property
    def dim(self):
        return len(self.simplices) - 1

    def counts(self):
        return [len(s) for s in self.simplices]

    @classmethod
    def empty(cls):
        return cls([], [])

    @classmethod
    def from_vertex_sets(cls, top_simplices):
        """Ordered simplicial complex generated by the given vertex tuples."""
        faces_all = set()
        for s in top_simplices:
            s = tuple(sorted(s))
            for r in range(1, len(s) + 1):
                from itertools import combinations
                faces_all.update(combinations(s, r))
        if not faces_all:
            return cls.empty()
        top = max(len(s) for s in faces_all) - 1
        simp = [sorted(s for s in faces_all if len(s) == n + 1) for n in range(top + 1)]
        index = [{s: k for k, s in enumerate(level)} for level in simp]
        faces = [[[] for _ in simp[0]]]
        for n in range(1, top + 1):
            faces.append([[index[n - 1][s[:i] + s[i + 1:]] for i in range(n + 1)] for s in simp[n]])
        return cls(simp, faces)

    @classmethod
    def standard_simplex(cls, n):
        return cls.from_vertex_sets([tuple(range(n + 1))])

    @classmethod
    def boundary_simplex(cls, n):
        v = tuple(range(n + 1))
        return cls.from_vertex_sets([v[:i] + v[i + 1:] for i in range(n + 1)])


def validate_simplicial_set(K):
    for n in range(2, K.dim + 1):
        for k, fs in enumerate(K.faces[n]):
            for j in range(n + 1):
                for i in range(j):
                    a = fs[j]
                    b = fs[i]
                    if a is None or b is None:
                        continue
                    lhs = K.faces[n - 1][a][i]
                    rhs = K.faces[n - 1][b][j - 1]
                    if lhs is not None and rhs is not None and lhs != rhs:
                        return Verdict(False, (n, k, i, j), "d_%d d_%d != d_%d d_%d" % (i, j, j - 1, i))
    return OK


def nerve(I, cap=None):
    """Nerve with nondegenerate n-simplices = chains of n nonidentity composable morphisms.

    Loop-free categories give an exact finite nerve; otherwise ``cap`` must be
    given and the result is flagged truncated.
    """
    loop_free = I.is_loop_free()
    if not loop_free and cap is None:
        raise ValueError("category has loops; pass cap to truncate the nerve")
    nonid = I.nonidentity()
    simp = [[(x,) for x in I.objects]]
    faces = [[[] for _ in I.objects]]
    vindex = {x: k for k, x in enumerate(I.objects)}
    n = 1
    truncated = False
    while True:
        if cap is not None and n > cap:
            truncated = any(True for _ in _extend_chains(I, simp[-1], nonid, n)) if n > 1 else bool(nonid)
            break
        if n == 1:
            level = [(f,) for f in nonid]
        else:
            level = list(_extend_chains(I, simp[-1], nonid, n))
        if not level:
            break
        prev = {s: k for k, s in enumerate(simp[-1])}
        lf = []
        for chain in level:
            fs = []
            for i in range(n + 1):
                if n == 1:
                    f = chain[0]
                    fs.append(vindex[I.target(f)] if i == 0 else vindex[I.source(f)])
                    continue
                if i == 0:
                    face = chain[1:]
                elif i == n:
                    face = chain[:-1]
                else:
                    comp = I.compose(chain[i], chain[i - 1])
                    face = None if I.is_identity(comp) else chain[:i - 1] + (comp,) + chain[i + 1:]
                fs.append(None if face is None else prev[face])
            lf.append(fs)
        simp.append(level)
        faces.append(lf)
        n += 1
    return SimplicialSet(simp, faces, truncated)


def _extend_chains(I, prev_level, nonid, n):
    for chain in prev_level:
        last = chain[-1]
        for f in nonid:
            if I.source(f) == I.target(last):
                yield chain + (f,)


def zk_chains(K):
    """Normalized integral chains: rank n = #nondegenerate n-simplices."""
    ranks = {n: len(s) for n, s in enumerate(K.simplices)}
    diffs = {}
    for n in range(1, K.dim + 1):
        M = im.zeros(ranks[n - 1], ranks[n])
        for k, fs in enumerate(K.faces[n]):
            for i, t in enumerate(fs):
                if t is not None:
                    M[t, k] += (-1) ** i
        diffs[n] = M
    return ChainComplex(ranks, diffs)


# ---------------------------------------------------------------------------
# dg-categories


class DgCategory:
    def __init__(self, objects, homs, comps=None, units=None, underlying=None):
        self.objects = list(objects)
        self._hom = {}
        for (a, b), H in dict(homs).items():
            self._hom[(a, b)] = H
        self._comp = dict(comps or {})
        self._unit = {}
        for a, u in dict(units or {}).items():
            if isinstance(u, ChainMap):
                self._unit[a] = u
            else:
                H = self.hom(a, a)
                col = im.asmat(np.array(u, dtype=object).reshape(-1, 1), (H.rank(0), 1))
                self._unit[a] = ChainMap(UNIT, H, {0: col})
        self.underlying = underlying

    def hom(self, a, b):
        H = self._hom.get((a, b))
        if H is None:
            H = ChainComplex.zero()
            self._hom[(a, b)] = H
        return H

    def comp(self, a, b, c):
        f = self._comp.get((a, b, c))
        src = tensor_product([self.hom(b, c), self.hom(a, b)]).complex
        if f is None or not (f.source is src):
            if f is None:
                f = ChainMap(src, self.hom(a, c), {})
            else:
                f = ChainMap(src, self.hom(a, c), {n: f[n] for n in f.degrees()})
            self._comp[(a, b, c)] = f
        return f

    def unit(self, a):
        u = self._unit.get(a)
        if u is None:
            u = ChainMap(UNIT, self.hom(a, a), {})
            self._unit[a] = u
        return u

    def unit_vector(self, a):
        return self.unit(a)[0]

    def index(self, c):
        return self.objects.index(c)


def validate_dg_category(C):
    for a in C.objects:
        for b in C.objects:
            v = validate_complex(C.hom(a, b))
            if not v:
                return Verdict(False, ("hom", a, b), "hom(%s,%s): %s" % (a, b, v.message))
    for a, b, c in product(C.objects, repeat=3):
        v = validate_map(C.comp(a, b, c))
        if not v:
            return Verdict(False, ("comp", a, b, c), "composition %s,%s,%s: %s" % (a, b, c, v.message))
    for a in C.objects:
        v = validate_map(C.unit(a))
        if not v:
            return Verdict(False, ("unit", a), "unit at %s is not a chain map" % (a,))
    for a, b, c, d in product(C.objects, repeat=4):
        src = tensor_product([C.hom(c, d), C.hom(b, c), C.hom(a, b)])
        if src.complex.is_zero():
            continue
        mid1 = tensor_product([C.hom(c, d), C.hom(a, c)])
        left = C.comp(a, c, d) @ apply_local(src, 1, 2, C.comp(a, b, c), mid1)
        mid2 = tensor_product([C.hom(b, d), C.hom(a, b)])
        right = C.comp(a, b, d) @ apply_local(src, 0, 2, C.comp(b, c, d), mid2)
        if not _maps_equal(left, right):
            return Verdict(False, (a, b, c, d), "associativity fails for objects (%s, %s, %s, %s)" % (a, b, c, d))
    for a, b in product(C.objects, repeat=2):
        H = C.hom(a, b)
        if H.is_zero():
            continue
        one = tensor_product([H])
        lu = C.comp(a, b, b) @ apply_local(one, 0, 0, C.unit(b), tensor_product([C.hom(b, b), H]))
        ru = C.comp(a, a, b) @ apply_local(one, 1, 0, C.unit(a), tensor_product([H, C.hom(a, a)]))
        ident = ChainMap.identity(H)
        if not _maps_equal(lu, ident):
            return Verdict(False, ("left unit", a, b), "left unit law fails on hom(%s,%s)" % (a, b))
        if not _maps_equal(ru, ident):
            return Verdict(False, ("right unit", a, b), "right unit law fails on hom(%s,%s)" % (a, b))
    return OK


def _maps_equal(f, g):
    degs = set(f.degrees()) | set(g.degrees())
    return all(np.array_equal(f[n], g[n]) for n in degs)


def free_dg_category(I):
    """Linearization: hom(i,j) = Z^{|I(i,j)|} in degree 0."""
    homs = {}
    for a in I.objects:
        for b in I.objects:
            k = len(I.hom(a, b))
            homs[(a, b)] = ChainComplex.sphere(0, k) if k else ChainComplex.zero()
    C = DgCategory(I.objects, homs, underlying=I)
    comps = {}
    for a, b, c in product(I.objects, repeat=3):
        hab, hbc, hac = I.hom(a, b), I.hom(b, c), I.hom(a, c)
        if not hab or not hbc:
            continue
        M = im.zeros(len(hac), len(hbc) * len(hab))
        for gi, g in enumerate(hbc):
            for fi, f in enumerate(hab):
                M[hac.index(I.compose(g, f)), gi * len(hab) + fi] = 1
        src = tensor_product([C.hom(b, c), C.hom(a, b)]).complex
        comps[(a, b, c)] = ChainMap(src, C.hom(a, c), {0: M})
    C._comp = comps
    for a in I.objects:
        col = im.zeros(len(I.hom(a, a)), 1)
        col[I.hom(a, a).index(I.identities[a]), 0] = 1
        C._unit[a] = ChainMap(UNIT, C.hom(a, a), {0: col})
    return C


# internal hom of chain complexes ------------------------------------------------


class _HomBasis:
    """Basis of the internal hom complex Hom(X, Y)_n."""

    def __init__(self, X, Y):
        self.X, self.Y = X, Y
        self.blocks = {}
        ranks = {}
        lo = Y.lo - X.hi
        hi = Y.hi - X.lo
        for n in range(lo, hi + 1):
            off = 0
            bl = []
            for k in X.degrees():
                r, c = Y.rank(k + n), X.rank(k)
                if r and c:
                    bl.append((k, off, r, c))
                    off += r * c
            if off:
                self.blocks[n] = bl
                ranks[n] = off
        self.ranks = ranks

    def to_vector(self, n, comps):
        v = im.zeros(self.ranks.get(n, 0), 1)
        for k, off, r, c in self.blocks.get(n, []):
            M = comps.get(k)
            if M is not None:
                v[off:off + r * c, 0] = M.reshape(-1)
        return v

    def element(self, n, index):
        comps = {}
        for k, off, r, c in self.blocks.get(n, []):
            M = im.zeros(r, c)
            if off <= index < off + r * c:
                M.reshape(-1)[index - off] = 1
            comps[k] = M
        return comps


def internal_hom(X, Y):
    B = _HomBasis(X, Y)
    diffs = {}
    for n, r in B.ranks.items():
        if n - 1 not in B.ranks:
            continue
        M = im.zeros(B.ranks[n - 1], r)
        for j in range(r):
            f = B.element(n, j)
            out = {}
            for k in X.degrees():
                term = im.zeros(Y.rank(k + n - 1), X.rank(k))
                if k in f and Y.rank(k + n - 1):
                    term = term + im.matmul(Y.d(k + n), f[k])
                if (k - 1) in f:
                    term = term - (-1) ** n * im.matmul(f[k - 1], X.d(k))
                out[k] = term
            M[:, j] = B.to_vector(n - 1, out)[:, 0]
        diffs[n] = M
    return ChainComplex(B.ranks, diffs), B


def full_subcategory_of_ch(complexes):
    """Full dg-subcategory of Ch on the named complexes (internal homs, plain composition)."""
    names = list(complexes)
    homs, bases = {}, {}
    for a in names:
        for b in names:
            homs[(a, b)], bases[(a, b)] = internal_hom(complexes[a], complexes[b])
    C = DgCategory(names, homs)
    for a, b, c in product(names, repeat=3):
        src = tensor_product([C.hom(b, c), C.hom(a, b)])
        Bab, Bbc, Bac = bases[(a, b)], bases[(b, c)], bases[(a, c)]
        comps = {}
        for n in src.complex.degrees():
            M = im.zeros(C.hom(a, c).rank(n), src.complex.rank(n))
            for k in range(src.complex.rank(n)):
                (p, q), (i, j) = src.key(n, k)
                g, f = Bbc.element(p, i), Bab.element(q, j)
                gf = {}
                for t, F in f.items():
                    G = g.get(t + q)
                    if G is not None:
                        gf[t] = im.matmul(G, F)
                M[:, k] = Bac.to_vector(n, gf)[:, 0]
            comps[n] = M
        C._comp[(a, b, c)] = ChainMap(src.complex, C.hom(a, c), comps)
    for a in names:
        X = complexes[a]
        v = bases[(a, a)].to_vector(0, {k: im.eye(X.rank(k)) for k in X.degrees()})
        C._unit[a] = ChainMap(UNIT, C.hom(a, a), {0: v})
    C.complexes = dict(complexes)
    C.hom_bases = bases
    return C


# ---------------------------------------------------------------------------
# presheaves (weights) and diagrams


class Presheaf:
    """Contravariant dg-functor: ``action(c', c) : W(c) ⊗ hom(c', c) -> W(c')``."""

    variance = "contravariant"

    def __init__(self, host, values, actions=None):
        self.host = host
        self._values = {c: values.get(c, ChainComplex.zero()) for c in host.objects}
        self._act = dict(actions or {})

    def value(self, c):
        return self._values[c]

    def action(self, c2, c):
        src = tensor_product([self.value(c), self.host.hom(c2, c)]).complex
        f = self._act.get((c2, c))
        if f is None or f.source is not src:
            f = ChainMap(src, self.value(c2), {} if f is None else {n: f[n] for n in f.degrees()})
            self._act[(c2, c)] = f
        return f


class Diagram:
    """Covariant dg-functor: ``action(c, c') : hom(c, c') ⊗ D(c) -> D(c')``."""

    variance = "covariant"

    def __init__(self, host, values, actions=None):
        self.host = host
        self._values = {c: values.get(c, ChainComplex.zero()) for c in host.objects}
        self._act = dict(actions or {})

    def value(self, c):
        return self._values[c]

    def action(self, c, c2):
        src = tensor_product([self.host.hom(c, c2), self.value(c)]).complex
        f = self._act.get((c, c2))
        if f is None or f.source is not src:
            f = ChainMap(src, self.value(c2), {} if f is None else {n: f[n] for n in f.degrees()})
            self._act[(c, c2)] = f
        return f


def validate_presheaf(W):
    C = W.host
    if isinstance(W, Diagram):
        return _validate_diagram(W)
    for c in C.objects:
        v = validate_complex(W.value(c))
        if not v:
            return Verdict(False, ("value", c), "value at %s: %s" % (c, v.message))
    for c2, c in product(C.objects, repeat=2):
        v = validate_map(W.action(c2, c))
        if not v:
            return Verdict(False, ("action", c2, c), "action (%s,%s) not a chain map" % (c2, c))
    for c, c1, c2 in product(C.objects, repeat=3):
        src = tensor_product([W.value(c), C.hom(c1, c), C.hom(c2, c1)])
        if src.complex.is_zero():
            continue
        left = W.action(c2, c1) @ apply_local(src, 0, 2, W.action(c1, c),
                                              tensor_product([W.value(c1), C.hom(c2, c1)]))
        right = W.action(c2, c) @ apply_local(src, 1, 2, C.comp(c2, c1, c),
                                              tensor_product([W.value(c), C.hom(c2, c)]))
        if not _maps_equal(left, right):
            return Verdict(False, ("assoc", c, c1, c2), "action not associative at (%s, %s, %s)" % (c, c1, c2))
    for c in C.objects:
        V = W.value(c)
        if V.is_zero():
            continue
        u = W.action(c, c) @ apply_local(tensor_product([V]), 1, 0, C.unit(c),
                                         tensor_product([V, C.hom(c, c)]))
        if not _maps_equal(u, ChainMap.identity(V)):
            return Verdict(False, ("unit", c), "unit acts nontrivially at %s" % (c,))
    return OK


def _validate_diagram(D):
    C = D.host
    for c in C.objects:
        v = validate_complex(D.value(c))
        if not v:
            return Verdict(False, ("value", c), "value at %s: %s" % (c, v.message))
    for c, c2 in product(C.objects, repeat=2):
        v = validate_map(D.action(c, c2))
        if not v:
            return Verdict(False, ("action", c, c2), "action (%s,%s) not a chain map" % (c, c2))
    for c, c1, c2 in product(C.objects, repeat=3):
        src = tensor_product([C.hom(c1, c2), C.hom(c, c1), D.value(c)])
        if src.complex.is_zero():
            continue
        left = D.action(c1, c2) @ apply_local(src, 1, 2, D.action(c, c1),
                                              tensor_product([C.hom(c1, c2), D.value(c1)]))
        right = D.action(c, c2) @ apply_local(src, 0, 2, C.comp(c, c1, c2),
                                              tensor_product([C.hom(c, c2), D.value(c)]))
        if not _maps_equal(left, right):
            return Verdict(False, ("assoc", c, c1, c2), "action not associative at (%s, %s, %s)" % (c, c1, c2))
    for c in C.objects:
        V = D.value(c)
        if V.is_zero():
            continue
        u = D.action(c, c) @ apply_local(tensor_product([V]), 0, 0, C.unit(c),
                                         tensor_product([C.hom(c, c), V]))
        if not _maps_equal(u, ChainMap.identity(V)):
            return Verdict(False, ("unit", c), "unit acts nontrivially at %s" % (c,))
    return OK


validate_diagram = _validate_diagram


def representable(C, c):
    """The presheaf hom(-, c) with action by composition."""
    vals = {x: C.hom(x, c) for x in C.objects}
    W = Presheaf(C, vals)
    for x, y in product(C.objects, repeat=2):
        W._act[(y, x)] = C.comp(y, x, c)
    return W


def corepresentable(C, c):
    """The diagram hom(c, -) with action by composition."""
    vals = {x: C.hom(c, x) for x in C.objects}
    D = Diagram(C, vals)
    for x, y in product(C.objects, repeat=2):
        D._act[(x, y)] = C.comp(c, x, y)
    return D


def constant_presheaf(C):
    """Constant weight Z over a linearized category (every morphism acts as 1)."""
    if C.underlying is None:
        raise ValueError("constant weight needs a free dg-category")
    W = Presheaf(C, {x: UNIT for x in C.objects})
    for x, y in product(C.objects, repeat=2):
        k = len(C.underlying.hom(y, x))
        if k:
            src = tensor_product([UNIT, C.hom(y, x)]).complex
            W._act[(y, x)] = ChainMap(src, UNIT, {0: im.asmat([[1] * k], (1, k))})
    return W


def diagram_from_functor(C, values, maps):
    """Diagram over a linearized category from chain maps D(f) per morphism name."""
    I = C.underlying
    D = Diagram(C, values)
    for x, y in product(C.objects, repeat=2):
        fs = I.hom(x, y)
        Dx, Dy = D.value(x), D.value(y)
        if not fs or Dx.is_zero() or Dy.is_zero():
            continue
        src = tensor_product([C.hom(x, y), Dx]).complex
        comps = {}
        for n in Dx.degrees():
            cols = []
            for f in fs:
                if I.is_identity(f):
                    cols.append(im.eye(Dx.rank(n)))
                else:
                    m = maps[f]
                    M = m[n] if isinstance(m, ChainMap) else m.get(n, im.zeros(Dy.rank(n), Dx.rank(n)))
                    cols.append(im.asmat(M, (Dy.rank(n), Dx.rank(n))))
            comps[n] = im.hstack(cols, Dy.rank(n))
        D._act[(x, y)] = ChainMap(src, Dy, comps)
    return D


class PresheafMap:
    """Natural transformation of presheaves (or of diagrams) by components."""

    def __init__(self, source, target, components):
        self.source, self.target = source, target
        self.components = dict(components)

    def __getitem__(self, c):
        return self.components[c]

    def compose(self, other):
        return PresheafMap(other.source, self.target,
                           {c: self[c] @ other[c] for c in self.source.host.objects})

    def __matmul__(self, other):
        return self.compose(other)

    def is_isomorphism(self):
        return all(self[c].is_isomorphism() for c in self.source.host.objects)


def validate_presheaf_map(alpha):
    W, V = alpha.source, alpha.target
    C = W.host
    for c in C.objects:
        v = validate_map(alpha[c])
        if not v:
            return Verdict(False, ("component", c), "component at %s is not a chain map" % (c,))
    contravariant = not isinstance(W, Diagram)
    for x, y in product(C.objects, repeat=2):
        if contravariant:
            H = C.hom(y, x)
            lhs = alpha[y] @ W.action(y, x)
            rhs = V.action(y, x) @ tensor_maps([alpha[x], ChainMap.identity(H)],
                                               tensor_product([W.value(x), H]),
                                               tensor_product([V.value(x), H]))
        else:
            H = C.hom(x, y)
            lhs = alpha[y] @ W.action(x, y)
            rhs = V.action(x, y) @ tensor_maps([ChainMap.identity(H), alpha[x]],
                                               tensor_product([H, W.value(x)]),
                                               tensor_product([H, V.value(x)]))
        if not _maps_equal(lhs, rhs):
            return Verdict(False, (x, y), "naturality fails for (%s, %s)" % (x, y))
    return OK


def direct_sum_presheaf(weights):
    """Pointwise direct sum of presheaves (or diagrams) over a shared host."""
    C = weights[0].host
    covariant = isinstance(weights[0], Diagram)
    vals = {c: DirectSum([W.value(c) for W in weights]).complex for c in C.objects}
    out = (Diagram if covariant else Presheaf)(C, vals)
    for x, y in product(C.objects, repeat=2):
        if covariant:
            iso, src, dsrc = distribute([W.value(x) for W in weights], C.hom(x, y), side="right")
            blocks = {(i, i): W.action(x, y) for i, W in enumerate(weights)}
            key = (x, y)
        else:
            iso, src, dsrc = distribute([W.value(x) for W in weights], C.hom(y, x), side="left")
            blocks = {(i, i): W.action(y, x) for i, W in enumerate(weights)}
            key = (y, x)
        tgt = DirectSum([W.value(y) for W in weights])
        out._act[key] = assemble(dsrc, tgt, blocks) @ iso
    return out


def flatness_report(C):
    """Surrogate flatness: homs degreewise free (always), units split injective."""
    per = {}
    lo = min((C.hom(a, b).lo for a in C.objects for b in C.objects if not C.hom(a, b).is_zero()), default=0)
    hi = max((C.hom(a, b).hi for a in C.objects for b in C.objects if not C.hom(a, b).is_zero()), default=-1)
    star = True
    for a in C.objects:
        v = is_cofibration(C.unit(a))
        per[a] = {"unit_split": bool(v), "detail": v.message}
        star = star and bool(v)
    return {"locally_flat": True, "hom_support": (lo, hi), "locally_star_flat": star, "objects": per}


def shift_presheaf(W, k):
    """W[k] = Z[k] ⊗ W with values shifted.

    Weights keep their action matrices; diagrams pick up (-1)^{k |h|} from
    moving the hom element past Z[k].
    """
    from .chain import shift
    C = W.host
    covariant = isinstance(W, Diagram)
    vals = {c: shift(W.value(c), k) for c in C.objects}
    out = (Diagram if covariant else Presheaf)(C, vals)
    for x, y in product(C.objects, repeat=2):
        if covariant:
            f = W.action(x, y)
            tp = tensor_product([C.hom(x, y), vals[x]])
            comps = {}
            for n in f.degrees():
                M = f[n].copy()
                for col in range(M.shape[1]):
                    (p, _), _ = tp.key(n + k, col)
                    if (k * p) % 2:
                        M[:, col] = -M[:, col]
                comps[n + k] = M
            out._act[(x, y)] = ChainMap(tp.complex, vals[y], comps)
        else:
            f = W.action(y, x)
            src = tensor_product([vals[x], C.hom(y, x)]).complex
            out._act[(y, x)] = ChainMap(src, vals[y], {n + k: f[n] for n in f.degrees()})
    return out
