"""Seeded random instances: complexes, hosts, weights, diagrams, cubes.

Everything takes a ``numpy.random.Generator`` so test corpora and the CLI
``--seed`` option draw the same families.
"""

from itertools import product

import numpy as np

from . import intmat as im
from .chain import ChainComplex, ChainMap, DirectSum, homology, tensor_product
from .enriched import (Diagram, FiniteCategory, Presheaf, corepresentable, diagram_from_functor,
                       direct_sum_presheaf, free_dg_category, full_subcategory_of_ch, representable)


def rng_from(seed):
    return np.random.default_rng(seed)


def random_unimodular(rng, n, steps=None):
    """Product of random elementary row operations (determinant ±1)."""
    M = im.eye(n)
    for _ in range(steps if steps is not None else 2 * n):
        if n < 2:
            break
        i, j = rng.choice(n, size=2, replace=False)
        M[i, :] = M[i, :] + int(rng.integers(-2, 3)) * M[j, :]
    if n and rng.integers(2):
        M[0, :] = -M[0, :]
    return M


def elementary_complex(pieces):
    """Direct sum of spheres ('s', k) and discs ('d', k, m): Z --m--> Z in degrees k, k-1."""
    ranks, entries = {}, []
    for p in pieces:
        if p[0] == "s":
            k = p[1]
            ranks[k] = ranks.get(k, 0) + 1
        else:
            _, k, m = p
            i_top, i_bot = ranks.get(k, 0), ranks.get(k - 1, 0)
            ranks[k] = i_top + 1
            ranks[k - 1] = i_bot + 1
            entries.append((k, i_bot, i_top, m))
    diffs = {k: im.zeros(ranks.get(k - 1, 0), ranks[k]) for k, _, _, _ in entries}
    for k, r, c, m in entries:
        diffs[k][r, c] = m
    return ChainComplex(ranks, diffs)


def expected_homology(pieces):
    """Homology of an elementary complex: spheres give Z, discs with |m| > 1 give Z/m.

    Torsion is returned in invariant-factor form.
    """
    groups = {}
    for p in pieces:
        if p[0] == "s":
            f, t = groups.get(p[1], (0, []))
            groups[p[1]] = (f + 1, t)
        elif abs(p[2]) > 1:
            f, t = groups.get(p[1] - 1, (0, []))
            groups[p[1] - 1] = (f, t + [abs(p[2])])
    return {k: (f, im.canonical_torsion(t)) for k, (f, t) in groups.items()}


def random_pieces(rng, lo=0, width=3, max_rank=3):
    pieces = []
    budget = {k: max_rank for k in range(lo, lo + width)}
    for _ in range(int(rng.integers(1, 2 * max_rank + 1))):
        k = int(rng.integers(lo, lo + width))
        if rng.random() < 0.5 or k == lo:
            if budget[k] >= 1:
                pieces.append(("s", k))
                budget[k] -= 1
        else:
            if budget[k] >= 1 and budget[k - 1] >= 1:
                m = int(rng.choice([1, 1, 2, 3, 4, -2]))
                pieces.append(("d", k, m))
                budget[k] -= 1
                budget[k - 1] -= 1
    return pieces


def scramble(C, rng):
    """Random change of basis in every degree (an isomorphic complex)."""
    P = {n: random_unimodular(rng, C.rank(n)) for n in C.degrees()}
    Pinv = {}
    for n, M in P.items():
        snf = im.smith_normal_form(M)
        Pinv[n] = im.matmul(snf.V, snf.U)   # M is unimodular so D = I
    diffs = {n: im.matmul(im.matmul(P[n - 1], C.d(n)), Pinv[n])
             for n in C.degrees() if C.rank(n) and C.rank(n - 1)}
    return ChainComplex(C.ranks, diffs)


def random_complex(rng, lo=0, width=3, max_rank=3, with_pieces=False):
    pieces = random_pieces(rng, lo, width, max_rank)
    C = scramble(elementary_complex(pieces), rng)
    return (C, pieces) if with_pieces else C


# ---------------------------------------------------------------------------
# hosts


SMALL_OBJECTS = {
    "Z": ("s", 0),
    "Z1": ("s", 1),
    "D1": ("d", 1, 1),
    "D2": ("d", 1, 2),
    "D3": ("d", 1, 3),
}


def small_complex(name):
    return elementary_complex([SMALL_OBJECTS[name]])


def random_ch_host(rng, max_objects=3):
    """Full dg-subcategory of Ch on small complexes in degrees [0, 1]."""
    k = int(rng.integers(1, max_objects + 1))
    names = sorted(rng.choice(sorted(SMALL_OBJECTS), size=k, replace=False).tolist())
    return full_subcategory_of_ch({n: small_complex(n) for n in names})


def random_poset(rng, max_objects=3):
    k = int(rng.integers(1, max_objects + 1))
    rel = [(a, b) for a in range(k) for b in range(a + 1, k) if rng.random() < 0.6]
    return FiniteCategory.poset(list(range(k)), rel)


def random_quiver_category(rng, max_objects=3):
    """Free category on a random acyclic quiver (parallel arrows allowed)."""
    k = int(rng.integers(2, max_objects + 1))
    edges = []
    for a in range(k):
        for b in range(a + 1, k):
            for e in range(int(rng.integers(0, 3)) if b == a + 1 else int(rng.integers(0, 2))):
                edges.append(("e%d%d%s" % (a, b, "abc"[e]), a, b))
    cat = FiniteCategory.free_on_quiver(list(range(k)), edges)
    if any(len(cat.hom(a, b)) > 2 for a in cat.objects for b in cat.objects):
        return random_poset(rng, max_objects)
    return cat


def random_host(rng, max_objects=3):
    r = rng.random()
    if r < 0.45:
        return random_ch_host(rng, max_objects)
    if r < 0.75:
        return free_dg_category(random_poset(rng, max_objects))
    return free_dg_category(random_quiver_category(rng, max_objects))


# ---------------------------------------------------------------------------
# diagrams and weights


def evaluation_diagram(C):
    """Tautological diagram X ↦ X of a full subcategory of Ch: f ⊗ x ↦ f(x)."""
    D = Diagram(C, dict(C.complexes))
    for a, b in product(C.objects, repeat=2):
        X, Y = C.complexes[a], C.complexes[b]
        H = C.hom(a, b)
        B = C.hom_bases[(a, b)]
        tp = tensor_product([H, X])
        comps = {}
        for m in tp.complex.degrees():
            M = im.zeros(Y.rank(m), tp.complex.rank(m))
            for col in range(tp.complex.rank(m)):
                (n, k), (i, j) = tp.key(m, col)
                f = B.element(n, i)
                if k in f:
                    M[:, col] = f[k][:, j]
            comps[m] = M
        D._act[(a, b)] = ChainMap(tp.complex, Y, comps)
    return D


def random_functor_diagram(rng, C, max_rank=2):
    """Diagram over a linearized poset/quiver category: degree-0 values, random maps on generators."""
    I = C.underlying
    vals = {x: ChainComplex({0: int(rng.integers(0, max_rank + 1))}) for x in I.objects}
    maps = {}
    # generators: nonidentity morphisms that are not composites of two nonidentity ones
    nonid = I.nonidentity()
    composite = set()
    for f in nonid:
        for g in nonid:
            if I.target(f) == I.source(g):
                composite.add(I.compose(g, f))
    gens = [f for f in nonid if f not in composite]
    mats = {}
    for f in gens:
        r, c = vals[I.target(f)].rank(0), vals[I.source(f)].rank(0)
        mats[f] = im.asmat(rng.integers(-2, 3, size=(r, c)).tolist() if r and c else [], (r, c))
    # composites in a loop-free category: fill along topological order
    pending = [f for f in nonid if f not in mats]
    while pending:
        progress = False
        for h in list(pending):
            for f in nonid:
                for g in nonid:
                    if h in mats:
                        break
                    if f in mats and g in mats and I.target(f) == I.source(g) and I.compose(g, f) == h:
                        mats[h] = im.matmul(mats[g], mats[f])
            if h in mats:
                pending.remove(h)
                progress = True
        if not progress:
            raise ValueError("composite without a factorization")
    for f, M in mats.items():
        maps[f] = {0: M}
    D = diagram_from_functor(C, vals, maps)
    from .enriched import validate_diagram
    if not validate_diagram(D):
        # parallel paths in a poset disagree: fall back to a corepresentable
        return corepresentable(C, C.objects[int(rng.integers(len(C.objects)))])
    return D


def random_diagram(rng, C):
    if C.underlying is not None and rng.random() < 0.6:
        D = random_functor_diagram(rng, C)
        if rng.random() < 0.5 and isinstance(D, Diagram) and C.underlying.is_loop_free():
            D = tensor_functor_diagram(D, random_complex(rng, 0, 2, 2))
        return D
    r = rng.random()
    if getattr(C, "complexes", None) is not None and r < 0.35:
        return evaluation_diagram(C)
    objs = C.objects
    picks = [objs[int(i)] for i in rng.integers(0, len(objs), size=int(rng.integers(1, 3)))]
    parts = [corepresentable(C, c) for c in picks]
    return parts[0] if len(parts) == 1 else direct_sum_presheaf(parts)


def random_representable_sum(rng, C):
    objs = C.objects
    picks = [objs[int(i)] for i in rng.integers(0, len(objs), size=int(rng.integers(1, 3)))]
    parts = [representable(C, c) for c in picks]
    return parts[0] if len(parts) == 1 else direct_sum_presheaf(parts)


def random_weight_cell(rng, C, cells=None):
    """Cell weight: attach 1-3 cells in degrees 0..1 with random cycle boundaries."""
    from .colim import WeightCell
    from .chain import _cycle_coords
    W = WeightCell(C)
    for _ in range(cells if cells is not None else int(rng.integers(1, 4))):
        c = C.objects[int(rng.integers(len(C.objects)))]
        n = int(rng.integers(0, 2))
        X = W.value(c)
        z = None
        if X.rank(n - 1):
            K, _ = _cycle_coords(X, n - 1)
            if K.shape[1]:
                coef = im.asmat([[int(x)] for x in rng.integers(-1, 2, size=K.shape[1])], (K.shape[1], 1))
                z = [int(x) for x in im.matmul(K, coef)[:, 0]]
        W = W.attach(c, n, z)
    return W


def random_map_between(rng, X, Y, tries=20):
    """A random chain map X -> Y (zero if nothing else is found quickly)."""
    from .chain import validate_map
    for _ in range(tries):
        comps = {n: im.asmat(rng.integers(-2, 3, size=(Y.rank(n), X.rank(n))).tolist()
                             if Y.rank(n) and X.rank(n) else [], (Y.rank(n), X.rank(n)))
                 for n in X.degrees()}
        f = ChainMap(X, Y, comps)
        if validate_map(f):
            return f
    return ChainMap(X, Y, {})


def random_cofibration(rng, max_rank=2):
    """Split inclusion A -> A ⊕ B composed with a change of basis."""
    A = random_complex(rng, 0, 2, max_rank)
    B = random_complex(rng, 0, 2, max_rank)
    S = DirectSum([A, B])
    return S.inclusion(0)


def random_one_cube_pair(rng):
    """Two maps, at least one a cofibration, for pushout-product checks."""
    f = random_cofibration(rng)
    X = random_complex(rng, 0, 2, 2)
    Y = random_complex(rng, 0, 2, 2)
    g = random_map_between(rng, X, Y)
    return (f, g) if rng.random() < 0.5 else (g, f)


def scaled_unit_host(factor=2):
    """One object, hom = Z, composition 1⊗1 ↦ 1 but unit = factor.

    This breaks the unit law (so it is not a dg-category); it is the smallest
    host whose degenerate bar summands are not split off.
    """
    from .enriched import DgCategory
    Z = ChainComplex.sphere(0)
    one = {0: [[1]]}
    C = DgCategory(["a"], {("a", "a"): Z}, {}, {"a": [factor]})
    C._comp[("a", "a", "a")] = ChainMap(tensor_product([Z, Z]).complex, Z, one)
    W = Presheaf(C, {"a": Z})
    W._act[("a", "a")] = ChainMap(tensor_product([Z, Z]).complex, Z, one)
    D = Diagram(C, {"a": Z})
    D._act[("a", "a")] = ChainMap(tensor_product([Z, Z]).complex, Z, one)
    return C, W, D


def scaled_unit_bar(N=2, factor=2):
    from .colim import bar_construction
    _, W, D = scaled_unit_host(factor)
    X = bar_construction(W, D, N)
    X.unchecked = "host violates the unit law on purpose"
    return X


def bar_instances(rng, want, size_cap=600, max_tries=None):
    """Cell weights with random diagrams over random hosts, filtered to certifiable cases.

    Returns (instances, skipped) where each instance is (C, W, D, window, N)
    and ``skipped`` counts the reasons an attempt was dropped: a torsion
    colimit, no certifiable truncation, or a bar over the size budget.
    """
    from .colim import auto_truncation, bar_size, weighted_colimit
    from .intmat import NonFreeCokernel
    out, skipped = [], {"torsion": 0, "no bound": 0, "size": 0}
    tries = 0
    while len(out) < want and (max_tries is None or tries < max_tries):
        tries += 1
        C = random_host(rng)
        D = random_diagram(rng, C)
        W = random_weight_cell(rng, C)
        try:
            col = weighted_colimit(W, D)
        except NonFreeCokernel:
            skipped["torsion"] += 1
            continue
        win = (min(col.complex.lo, 0) - 1, max(col.complex.hi, 0) + 1)
        N = auto_truncation(W, D, win)
        if N is None:
            skipped["no bound"] += 1
            continue
        if bar_size(W, D, N) > size_cap:
            skipped["size"] += 1
            continue
        out.append((C, W, D, win, N))
    return out, skipped


def tensor_functor_diagram(D, K):
    """x ↦ D(x) ⊗ K with f ↦ D(f) ⊗ id, for a diagram over a linearized category."""
    from .colim import _functor_map
    from .chain import tensor_maps
    C = D.host
    I = C.underlying
    vals = {x: tensor_product([D.value(x), K]).complex for x in I.objects}
    idK = ChainMap.identity(K)
    maps = {}
    for f in I.nonidentity():
        s, t = I.source(f), I.target(f)
        maps[f] = tensor_maps([_functor_map(D, f), idK], tensor_product([D.value(s), K]),
                              tensor_product([D.value(t), K]))
    return diagram_from_functor(C, vals, maps)


def random_index_category(rng, max_objects=3):
    """Loop-free category with at least one nonidentity morphism."""
    while True:
        I = random_quiver_category(rng, max_objects) if rng.random() < 0.4 else random_poset(rng, max_objects)
        if I.nonidentity():
            return I


def random_graded_diagram(rng, C, lo=0, width=2):
    """Degree-0 functor diagram tensored with a random complex in degrees lo..lo+width-1."""
    return tensor_functor_diagram(random_functor_diagram(rng, C), random_complex(rng, lo, width, 2))
