"""Restriction and left Kan extension along dg-functors, and retract criteria.

A DgFunctor F : D -> C carries an object map and chain maps
hom_D(x, y) -> hom_C(Fx, Fy).
"""

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import intmat as im
from .chain import (ChainComplex, ChainMap, DirectSum, GradedAbelianGroup, Verdict, OK, apply_local,
                    homology, is_quasi_iso, mapping_cone, tensor_maps, tensor_product, validate_map,
                    _cycle_coords)
from .colim import cofibrant_replacement, weighted_colimit, _recast
from .enriched import (Diagram, Presheaf, PresheafMap, corepresentable, representable, _maps_equal)
from .simplicial import window_quasi_iso


class DgFunctor:
    def __init__(self, source, target, objects, homs=None):
        self.source, self.target = source, target
        self.objects = dict(objects)
        self._homs = dict(homs or {})

    def __call__(self, d):
        return self.objects[d]

    def hom(self, x, y):
        f = self._homs.get((x, y))
        S, T = self.source.hom(x, y), self.target.hom(self(x), self(y))
        if f is None or f.source is not S or f.target is not T:
            f = ChainMap(S, T, {} if f is None else {n: f[n] for n in f.degrees()})
            self._homs[(x, y)] = f
        return f

    @classmethod
    def identity(cls, C):
        return cls(C, C, {c: c for c in C.objects},
                   {(x, y): ChainMap.identity(C.hom(x, y)) for x in C.objects for y in C.objects})

    @classmethod
    def inclusion(cls, D, C, objects=None):
        """Inclusion of a full subcategory (hom components are identities)."""
        objs = dict(objects or {d: d for d in D.objects})
        homs = {}
        for x, y in product(D.objects, repeat=2):
            S, T = D.hom(x, y), C.hom(objs[x], objs[y])
            homs[(x, y)] = ChainMap(S, T, {n: im.eye(S.rank(n)) for n in S.degrees()})
        return cls(D, C, objs, homs)


def validate_functor(F):
    D, C = F.source, F.target
    for d in D.objects:
        if F(d) not in C.objects:
            return Verdict(False, d, "object %s maps outside the target" % (d,))
    for x, y in product(D.objects, repeat=2):
        v = validate_map(F.hom(x, y))
        if not v:
            return Verdict(False, (x, y), "component (%s,%s) is not a chain map" % (x, y))
    for a, b, c in product(D.objects, repeat=3):
        src = tensor_product([D.hom(b, c), D.hom(a, b)])
        if src.complex.is_zero():
            continue
        lhs = F.hom(a, c) @ D.comp(a, b, c)
        mid = tensor_product([C.hom(F(b), F(c)), C.hom(F(a), F(b))])
        rhs = C.comp(F(a), F(b), F(c)) @ tensor_maps([F.hom(b, c), F.hom(a, b)], src, mid)
        if not _maps_equal(lhs, rhs):
            return Verdict(False, (a, b, c), "composition not preserved at (%s, %s, %s)" % (a, b, c))
    for d in D.objects:
        if not _maps_equal(F.hom(d, d) @ D.unit(d), C.unit(F(d))):
            return Verdict(False, (d,), "unit not preserved at %s" % (d,))
    return OK


# ---------------------------------------------------------------------------
# restriction


def restrict(F, V):
    """F*V = V ∘ F, for a weight or a diagram over F's target."""
    D, C = F.source, F.target
    covariant = isinstance(V, Diagram)
    vals = {d: V.value(F(d)) for d in D.objects}
    out = (Diagram if covariant else Presheaf)(D, vals)
    for x, y in product(D.objects, repeat=2):
        if covariant:
            src = tensor_product([D.hom(x, y), vals[x]])
            mid = tensor_product([C.hom(F(x), F(y)), vals[x]])
            f = V.action(F(x), F(y)) @ tensor_maps([F.hom(x, y), ChainMap.identity(vals[x])], src, mid)
            out._act[(x, y)] = f
        else:
            src = tensor_product([vals[x], D.hom(y, x)])
            mid = tensor_product([vals[x], C.hom(F(y), F(x))])
            f = V.action(F(y), F(x)) @ tensor_maps([ChainMap.identity(vals[x]), F.hom(y, x)], src, mid)
            out._act[(y, x)] = f
    return out


def restrict_map(F, alpha):
    D = F.source
    return PresheafMap(restrict(F, alpha.source), restrict(F, alpha.target),
                       {d: alpha[F(d)] for d in D.objects})


# ---------------------------------------------------------------------------
# left Kan extension


class LeftKan(Presheaf):
    """F_!W with value at c the weighted colimit of W against hom_C(c, F-)."""

    def __init__(self, F, W):
        C = F.target
        self.functor, self.weight = F, W
        self.colimits = {}
        self.diagrams = {}
        for c in C.objects:
            self.diagrams[c] = restrict(F, corepresentable(C, c))
            self.colimits[c] = weighted_colimit(W, self.diagrams[c])
        super().__init__(C, {c: self.colimits[c].complex for c in C.objects})
        for c, c2 in product(C.objects, repeat=2):
            self._act[(c2, c)] = self._action(c2, c)

    def _action(self, c2, c):
        """F_!W(c) ⊗ hom(c2, c) -> F_!W(c2) by precomposition on the hom factor."""
        F, W, C = self.functor, self.weight, self.functor.target
        D = F.source
        H = C.hom(c2, c)
        src_col, tgt_col = self.colimits[c], self.colimits[c2]
        src = tensor_product([src_col.complex, H])
        tgt = tgt_col.complex
        local = {}
        comps = {}
        for m in src.complex.degrees():
            M = im.zeros(tgt.rank(m), src.complex.rank(m))
            for k in range(src.complex.rank(m)):
                (p, q), (i, j) = src.key(m, k)
                lift = src_col.presentation.lift(p)[:, i]
                out = im.zeros(tgt_col.summands.complex.rank(m), 1)
                for di, d in enumerate(D.objects):
                    tp = tensor_product([W.value(d), C.hom(c, F(d))])
                    off = src_col.summands.offset(di, p)
                    size = tp.complex.rank(p)
                    seg = lift[off:off + size]
                    if not size or not any(seg):
                        continue
                    if d not in local:
                        big = tensor_product([W.value(d), C.hom(c, F(d)), H])
                        tt = tensor_product([W.value(d), C.hom(c2, F(d))])
                        local[d] = (big, apply_local(big, 1, 2, C.comp(c2, c, F(d)), tt))
                    big, f = local[d]
                    toff = tgt_col.summands.offset(di, m)
                    for e, x in enumerate(seg):
                        if x:
                            degs, idxs = tp.key(p, e)
                            img = f[m][:, big.index(degs + (q,), idxs + (j,))]
                            out[toff:toff + img.shape[0], 0] += x * img
                M[:, k] = im.matmul(tgt_col.quotient[m], out)[:, 0]
            comps[m] = M
        return ChainMap(src.complex, tgt, comps)


def left_kan(F, W):
    return LeftKan(F, W)


def left_kan_map(F, alpha, source=None, target=None):
    """F_!(alpha) for a map of weights over F's source."""
    A = source or LeftKan(F, alpha.source)
    B = target or LeftKan(F, alpha.target)
    D, C = F.source, F.target
    comps = {}
    for c in C.objects:
        blocks = {}
        for di, d in enumerate(D.objects):
            Hc = C.hom(c, F(d))
            s = tensor_product([alpha.source.value(d), Hc])
            t = tensor_product([alpha.target.value(d), Hc])
            blocks[(di, di)] = tensor_maps([alpha[d], ChainMap.identity(Hc)], s, t)
        from .chain import assemble
        g = assemble(A.colimits[c].summands, B.colimits[c].summands, blocks)
        q = B.colimits[c].quotient
        g = _recast(g, A.colimits[c].summands.complex, q.source)
        comps[c] = A.colimits[c].presentation.descend(q @ g)
    return PresheafMap(A, B, comps)


def unit_map(F, W, kan=None):
    """eta : W -> F*F_!W, w ↦ [w ⊗ id_{Fd}]."""
    K = kan or LeftKan(F, W)
    D, C = F.source, F.target
    R = restrict(F, K)
    comps = {}
    for di, d in enumerate(D.objects):
        col = K.colimits[F(d)]
        X = W.value(d)
        tp = tensor_product([X, C.hom(F(d), F(d))])
        ins = apply_local(tensor_product([X]), 1, 0, C.unit(F(d)), tp)
        leg = col.quotient @ col.summands.inclusion(di)
        comps[d] = _recast(leg @ _recast(ins, X, leg.source), X, R.value(d))
    return PresheafMap(W, R, comps)


def counit_map(F, V, kan=None):
    """epsilon : F_!F*V -> V by the action of V."""
    FV = restrict(F, V)
    K = kan or LeftKan(F, FV)
    D, C = F.source, F.target
    comps = {}
    for c in C.objects:
        col = K.colimits[c]
        blocks = {}
        from .chain import assemble
        tgt = DirectSum([V.value(c)])
        for di, d in enumerate(D.objects):
            blocks[(di, 0)] = V.action(c, F(d))
        g = assemble(col.summands, tgt, blocks)
        g = ChainMap(col.summands.complex, V.value(c), {n: g[n] for n in g.degrees()})
        comps[c] = col.presentation.descend(g)
    return PresheafMap(K, V, comps)


def triangle_identities(F, W, V):
    """(eps F_!)(F_! eta) = id on F_!W and (F* eps)(eta F*) = id on F*V."""
    K = LeftKan(F, W)
    eta = unit_map(F, W, K)
    KK = LeftKan(F, eta.target)
    left = counit_map(F, K, KK) @ left_kan_map(F, eta, K, KK)
    ok1 = all(_maps_equal(left[c], ChainMap.identity(K.value(c))) for c in F.target.objects)
    FV = restrict(F, V)
    K2 = LeftKan(F, FV)
    eta2 = unit_map(F, FV, K2)
    eps = counit_map(F, V, K2)
    right = restrict_map(F, eps) @ eta2
    ok2 = all(_maps_equal(right[d], ChainMap.identity(FV.value(d))) for d in F.source.objects)
    if ok1 and ok2:
        return OK
    return Verdict(False, "left" if not ok1 else "right", "triangle identity fails (%s)" % ("left" if not ok1 else "right"))


def kan_representable_check(F, d):
    """F_!(hom_D(-, d)) ≅ hom_C(-, Fd) via h ↦ [id_d ⊗ h]."""
    D, C = F.source, F.target
    K = LeftKan(F, representable(D, d))
    di = D.objects.index(d)
    comps = {}
    for c in C.objects:
        col = K.colimits[c]
        H = C.hom(c, F(d))
        tp = tensor_product([D.hom(d, d), H])
        ins = apply_local(tensor_product([H]), 0, 0, D.unit(d), tp)
        leg = col.quotient @ col.summands.inclusion(di)
        comps[c] = leg @ _recast(ins, H, leg.source)
    alpha = PresheafMap(representable(C, F(d)), K, comps)
    from .enriched import validate_presheaf_map
    v = validate_presheaf_map(alpha)
    if not v:
        return v
    if not alpha.is_isomorphism():
        return Verdict(False, d, "comparison map is not invertible")
    return Verdict(True, data={"map": alpha})


# ---------------------------------------------------------------------------
# homotopical full faithfulness


def is_homotopically_ff(F):
    """Strict quasi-isomorphism test on every hom component; returns {(x, y): Verdict}."""
    D = F.source
    out = {}
    for x, y in product(D.objects, repeat=2):
        v = is_quasi_iso(F.hom(x, y))
        if not v:
            H = v.data.get("cone_homology")
            v = Verdict(False, (x, y), "hom(%s,%s): %s" % (x, y, v.message), v.data)
        out[(x, y)] = v
    return out


# ---------------------------------------------------------------------------
# H_0 retract witnesses


@dataclass
class RetractWitness:
    obj: object
    summands: list          # (d, i coordinates in H_0 hom(c, Fd), r coordinates in H_0 hom(Fd, c))
    certificate: str


@dataclass
class RetractResult:
    status: str             # found | nonexistent | not-found-within-bounds
    witness: RetractWitness = None
    detail: str = ""

    def __bool__(self):
        return self.status == "found"


class _H0:
    """H_0 of a complex as Z^k / relations, with coordinates of degree-0 cycles."""

    def __init__(self, X):
        self.K, self.L = _cycle_coords(X, 0)
        k = self.K.shape[1]
        self.gens = k
        self.rel = im.matmul(self.L, X.d(1)) if k and X.rank(1) else im.zeros(k, 0)

    def coords(self, z):
        return im.matmul(self.L, z) if self.gens else im.zeros(0, 1)

    def is_zero(self, v):
        if not self.gens:
            return True
        return im.solve(self.rel, v) is not None if self.rel.shape[1] else im.is_zero(v)

    def group(self):
        snf = im.invariant_factors(self.rel) if self.rel.size else []
        tors = [d for d in snf if d != 1]
        return self.gens - len(snf), tors


def _product_class(C, c, x, Hcc, r_cyc, i_cyc):
    """Class of r ∘ i in H_0 hom(c, c) for degree-0 cycles r, i."""
    f = C.comp(c, x, c)
    tp = tensor_product([C.hom(x, c), C.hom(c, x)])
    off = tp.offset((0, 0))
    if off is None:
        return im.zeros(Hcc.gens, 1)
    v = im.kron(r_cyc, i_cyc)
    prod_vec = im.matmul(f[0][:, off:off + v.shape[0]], v)
    return Hcc.coords(prod_vec)


def h0_retract_witness(F, c, max_summands=3):
    """Find classes i_k, r_k with Σ r_k i_k = [id_c] in H_0 hom(c, c).

    The set of all such sums is the subgroup generated by products of
    generators, so one integer system decides existence outright. A solution
    is split into rank-one terms to produce the summands.
    """
    C, D = F.target, F.source
    Hcc = _H0(C.hom(c, c))
    ident = Hcc.coords(C.unit(c)[0])
    if Hcc.is_zero(ident):
        return RetractResult("found", RetractWitness(c, [], "[id] = 0 in H_0 hom(c,c)"), "zero object")
    for d in D.objects:
        if F(d) == c:
            e = C.unit(c)[0]
            Hi = _H0(C.hom(c, c))
            w = RetractWitness(c, [(d, Hi.coords(e), Hi.coords(e))], "c = F(%s)" % (d,))
            return RetractResult("found", w, "object in the image")
    cols, labels = [], []
    data = {}
    for d in D.objects:
        x = F(d)
        Hi, Hr = _H0(C.hom(c, x)), _H0(C.hom(x, c))
        data[d] = (Hi, Hr)
        for a in range(Hr.gens):
            for b in range(Hi.gens):
                cols.append(_product_class(C, c, x, Hcc, Hr.K[:, a:a + 1], Hi.K[:, b:b + 1]))
                labels.append((d, a, b))
    A = im.hstack(cols + [Hcc.rel], Hcc.gens)
    x = im.solve(A, ident) if A.shape[1] else None
    if x is None:
        return RetractResult("nonexistent", None,
                             "[id] is not in the subgroup generated by composites through the image")
    summands = []
    for d in D.objects:
        Hi, Hr = data[d]
        if not Hi.gens or not Hr.gens:
            continue
        X = im.zeros(Hr.gens, Hi.gens)
        for k, (dd, a, b) in enumerate(labels):
            if dd == d:
                X[a, b] = x[k, 0]
        if im.is_zero(X):
            continue
        snf = im.smith_normal_form(X)
        for t, s in enumerate(snf.diagonal):
            r = s * snf.Uinv[:, t:t + 1]
            i = snf.Vinv[t:t + 1, :].T.copy()
            summands.append((d, i, r))
    # verify the certificate independently
    total = im.zeros(Hcc.gens, 1)
    for d, i, r in summands:
        Hi, Hr = data[d]
        rc = im.matmul(Hr.K, r)
        ic = im.matmul(Hi.K, i)
        total = total + _product_class(C, c, F(d), Hcc, rc, ic)
    if not Hcc.is_zero(total - ident):
        return RetractResult("not-found-within-bounds", None, "decomposition failed verification")
    w = RetractWitness(c, summands, "sum of %d composites equals [id] in H_0" % len(summands))
    if len(summands) > max_summands:
        return RetractResult("not-found-within-bounds", w,
                             "witness needs %d summands (> %d)" % (len(summands), max_summands))
    return RetractResult("found", w)


# ---------------------------------------------------------------------------
# derived counit


def _hom_degree_range(C, c2, F):
    lo, hi = [], []
    for d in F.source.objects:
        H = C.hom(c2, F(d))
        if not H.is_zero():
            lo.append(H.lo)
            hi.append(H.hi)
    return (min(lo) if lo else 0), (max(hi) if hi else 0)


def derived_counit_check(F, c, window, N=None, allow_heuristic=False, trust_tail_bound=True):
    """Is F_!Q(F*hom(-, c)) -> hom(-, c) a pointwise quasi-isomorphism on the window?

    Q is the truncated bar replacement; its window is widened by the hom
    degrees that the Kan extension tensors with.
    """
    C, D = F.target, F.source
    a, b = window
    lo = min(_hom_degree_range(C, x, F)[0] for x in C.objects) if C.objects else 0
    hi = max(_hom_degree_range(C, x, F)[1] for x in C.objects) if C.objects else 0
    qwin = (a - max(0, hi), b - min(0, lo))
    V = representable(C, c)
    W = restrict(F, V)
    rep = cofibrant_replacement(W, qwin, N=N, allow_heuristic=allow_heuristic or not trust_tail_bound,
                                trust_tail_bound=trust_tail_bound)
    Q = rep.weight
    K = LeftKan(F, Q)
    per = {}
    from .chain import assemble
    for x in C.objects:
        # Q(d) ⊗ hom(x, Fd) -> W(d) ⊗ hom(x, Fd) -> hom(x, c), summand by summand
        col = K.colimits[x]
        blocks = {}
        for di, d in enumerate(D.objects):
            H = C.hom(x, F(d))
            s = tensor_product([Q.value(d), H])
            t = tensor_product([V.value(F(d)), H])
            blocks[(di, 0)] = V.action(x, F(d)) @ tensor_maps([rep.augmentation[d], ChainMap.identity(H)], s, t)
        g = assemble(col.summands, DirectSum([V.value(x)]), blocks)
        g = ChainMap(col.summands.complex, V.value(x), {n: g[n] for n in g.degrees()})
        per[x] = window_quasi_iso(col.presentation.descend(g), window)
    modes = sorted({cert.mode for cert in rep.certificates.values()})
    mode = "sound" if modes == ["sound"] else [m for m in modes if m != "sound"][0]
    ok = all(per.values())
    bad = [x for x in C.objects if not per[x]]
    msg = "" if ok else "counit fails at %s: %s" % (bad[0], per[bad[0]].message)
    return Verdict(ok, bad[0] if bad else None, msg,
                   {"per_object": per, "mode": mode, "replacement_window": qwin,
                    "replacement_verdicts": rep.verdicts})
