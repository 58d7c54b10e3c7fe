"""Truncated simplicial objects in chain complexes.

Levels X_0..X_N are ChainComplexes; ``faces[n]`` lists d_0..d_n : X_n -> X_{n-1}
and ``degens[n]`` lists s_0..s_n : X_n -> X_{n+1}. An augmentation
eps : X_0 -> X_{-1} and an extra degeneracy (s_{-1} : X_{n-1} -> X_n for
n = 0..N, with X_{-1} the augmentation target) are optional.
"""

from dataclasses import dataclass, field
from itertools import combinations
import math

import numpy as np

from . import intmat as im
from .chain import (ChainComplex, ChainMap, DirectSum, GradedAbelianGroup, Quotient, UnsoundWindow,
                    Verdict, OK, assemble, homology, induces_iso_on_homology, validate_map)

INF = math.inf


class SimplicialObject:
    def __init__(self, levels, faces, degens, augmentation=None, extra=None,
                 tail_bound=None, extend=None, name=None):
        self.levels = list(levels)
        self.faces = [list(f) for f in faces]
        self.degens = [list(s) for s in degens]
        self.augmentation = augmentation
        self.extra = None if extra is None else list(extra)
        # lower bound on the total degree of nondegenerate parts above level N
        self.tail_bound = tail_bound
        # callable M -> SimplicialObject truncated at M (same data below)
        self.extend = extend
        self.name = name

    @property
    def N(self):
        return len(self.levels) - 1

    @property
    def aug_target(self):
        return None if self.augmentation is None else self.augmentation.target

    def face(self, n, i):
        """d_i on level n; the augmentation counts as d_0 on level 0."""
        if n == 0:
            return self.augmentation
        return self.faces[n][i]

    def rank_table(self):
        return [{int(k): X.rank(k) for k in X.degrees() if X.rank(k)} for X in self.levels]


def _eq(f, g):
    degs = set(f.degrees()) | set(g.degrees())
    return all(np.array_equal(f[n], g[n]) for n in degs)


def _ident(X):
    return ChainMap.identity(X)


def validate_simplicial(X):
    """All simplicial identities (and eps d0 = eps d1) as exact matrix equations."""
    N = X.N
    for n in range(N + 1):
        for k, f in enumerate(X.faces[n] if n else []):
            v = validate_map(f)
            if not v:
                return Verdict(False, ("d", n, k), "d_%d on level %d is not a chain map" % (k, n))
    for n in range(N):
        for k, s in enumerate(X.degens[n]):
            v = validate_map(s)
            if not v:
                return Verdict(False, ("s", n, k), "s_%d on level %d is not a chain map" % (k, n))
    # d_i d_j = d_{j-1} d_i, i < j
    for n in range(2, N + 1):
        for j in range(n + 1):
            for i in range(j):
                if not _eq(X.faces[n - 1][i] @ X.faces[n][j], X.faces[n - 1][j - 1] @ X.faces[n][i]):
                    return Verdict(False, ("dd", n, i, j),
                                   "d_%d d_%d = d_%d d_%d fails on level %d" % (i, j, j - 1, i, n))
    # s_i s_j = s_{j+1} s_i, i <= j
    for n in range(N - 1):
        for j in range(n + 1):
            for i in range(j + 1):
                if not _eq(X.degens[n + 1][i] @ X.degens[n][j], X.degens[n + 1][j + 1] @ X.degens[n][i]):
                    return Verdict(False, ("ss", n, i, j),
                                   "s_%d s_%d = s_%d s_%d fails on level %d" % (i, j, j + 1, i, n))
    # mixed relations: d_i s_j on level n (s_j : X_n -> X_{n+1})
    for n in range(N):
        for j in range(n + 1):
            s = X.degens[n][j]
            for i in range(n + 2):
                lhs = X.faces[n + 1][i] @ s
                if i < j:
                    rhs = X.degens[n - 1][j - 1] @ X.faces[n][i]
                elif i in (j, j + 1):
                    rhs = _ident(X.levels[n])
                else:
                    rhs = X.degens[n - 1][j] @ X.faces[n][i - 1]
                if not _eq(lhs, rhs):
                    return Verdict(False, ("ds", n, i, j), "d_%d s_%d relation fails on level %d" % (i, j, n))
    if X.augmentation is not None:
        v = validate_map(X.augmentation)
        if not v:
            return Verdict(False, ("eps",), "augmentation is not a chain map")
        if N >= 1 and not _eq(X.augmentation @ X.faces[1][0], X.augmentation @ X.faces[1][1]):
            return Verdict(False, ("eps d",), "eps d_0 = eps d_1 fails")
    return OK


def check_extra_degeneracy(X):
    """Verify the extra-degeneracy relations; the verdict names the first failure."""
    if X.augmentation is None:
        raise ValueError("extra degeneracy needs an augmentation")
    if X.extra is None or len(X.extra) < X.N + 1:
        return Verdict(False, ("missing",), "no extra degeneracy supplied")
    N, e = X.N, X.extra
    for n in range(N + 1):
        v = validate_map(e[n])
        if not v:
            return Verdict(False, ("s-1", n), "s_-1 into level %d is not a chain map" % n)
    bottom = X.augmentation @ e[0]
    if not _eq(bottom, _ident(X.aug_target)):
        return Verdict(False, ("eps s-1", 0), "eps s_-1 = id fails")
    for n in range(1, N + 1):
        if not _eq(X.faces[n][0] @ e[n], _ident(X.levels[n - 1])):
            return Verdict(False, ("d0 s-1", n), "d_0 s_-1 = id fails on level %d" % (n - 1))
        for i in range(n):
            lhs = X.faces[n][i + 1] @ e[n]
            rhs = e[n - 1] @ X.face(n - 1, i)
            if not _eq(lhs, rhs):
                return Verdict(False, ("d s-1", n, i),
                               "d_%d s_-1 = s_-1 d_%d fails on level %d" % (i + 1, i, n - 1))
    for n in range(N):
        # s_0 s_-1 = s_-1 s_-1
        if not _eq(X.degens[n][0] @ e[n], e[n + 1] @ e[n]):
            return Verdict(False, ("s s-1", n, -1), "s_0 s_-1 = s_-1 s_-1 fails on level %d" % (n - 1))
        for j in range(n):
            lhs = X.degens[n][j + 1] @ e[n]
            rhs = e[n + 1] @ X.degens[n - 1][j]
            if not _eq(lhs, rhs):
                return Verdict(False, ("s s-1", n, j),
                               "s_%d s_-1 = s_-1 s_%d fails on level %d" % (j + 1, j, n - 1))
    return OK


# ---------------------------------------------------------------------------
# normalization and realization


def normalize(X):
    """Per-level Quotients of X_n by the images of all degeneracies."""
    out = []
    for n, L in enumerate(X.levels):
        if n == 0:
            out.append(Quotient(ChainMap(ChainComplex.zero(), L, {}), where=("level", 0)))
            continue
        prev = X.levels[n - 1]
        src = DirectSum([prev] * n)
        tgt = DirectSum([L])
        stacked = assemble(src, tgt, {(j, 0): X.degens[n - 1][j] for j in range(n)})
        stacked = ChainMap(src.complex, L, {k: stacked[k] for k in stacked.degrees()})
        out.append(Quotient(stacked, where=("level", n)))
    return out


def normalized_faces(X, quotients=None):
    """Alternating face sums on the normalized levels."""
    qs = quotients or normalize(X)
    out = [None]
    for n in range(1, X.N + 1):
        A, B = qs[n].complex, qs[n - 1].complex
        comps = {}
        for k in A.degrees():
            dsum = im.zeros(X.levels[n - 1].rank(k), X.levels[n].rank(k))
            for i, f in enumerate(X.faces[n]):
                dsum = dsum + (-1) ** i * f[k]
            comps[k] = im.matmul(im.matmul(qs[n - 1].quotient[k], dsum), qs[n].lift(k))
        out.append(ChainMap(A, B, comps))
    return out


@dataclass
class TruncationCertificate:
    mode: str                       # sound | heuristic-stable | heuristic-unstable | heuristic-unchecked
    window: tuple
    level_min_degree: list          # per level 0..N, minimal total degree of the normalized part
    tail_bound: float
    detail: str = ""

    @property
    def sound(self):
        return self.mode == "sound"

    def to_json(self):
        tb = None if self.tail_bound is None or self.tail_bound == INF else self.tail_bound
        return {"mode": self.mode, "window": list(self.window),
                "level_min_degree": [None if x is None else int(x) for x in self.level_min_degree],
                "tail_bound": "inf" if self.tail_bound == INF else tb, "detail": self.detail}


@dataclass
class Realization:
    complex: ChainComplex
    certificate: TruncationCertificate
    normalized: list
    offsets: dict = field(default_factory=dict)   # (n, k) -> offset in total degree n+k
    augmentation: ChainMap = None

    def include(self, n, k):
        """Columns of the total complex occupied by (normalized level n, internal degree k)."""
        return self.offsets.get((n, k))


def _total(X, qs, nfaces):
    ranks, offsets = {}, {}
    for n, Q in enumerate(qs):
        for k in Q.complex.degrees():
            r = Q.complex.rank(k)
            if r:
                m = n + k
                offsets[(n, k)] = ranks.get(m, 0)
                ranks[m] = ranks.get(m, 0) + r
    diffs = {}
    for m in ranks:
        if m - 1 not in ranks:
            continue
        M = im.zeros(ranks[m - 1], ranks[m])
        for n, Q in enumerate(qs):
            k = m - n
            if (n, k) not in offsets:
                continue
            c = offsets[(n, k)]
            w = Q.complex.rank(k)
            if (n, k - 1) in offsets:
                r = offsets[(n, k - 1)]
                M[r:r + Q.complex.rank(k - 1), c:c + w] += Q.complex.d(k)
            if n >= 1 and (n - 1, k) in offsets:
                r = offsets[(n - 1, k)]
                M[r:r + qs[n - 1].complex.rank(k), c:c + w] += (-1) ** k * nfaces[n][k]
        diffs[m] = M
    return ChainComplex(ranks, diffs), offsets


def _level_min(qs):
    out = []
    for n, Q in enumerate(qs):
        degs = [k for k in Q.complex.degrees() if Q.complex.rank(k)]
        out.append(n + min(degs) if degs else None)
    return out


def realize(X, window):
    """Total complex of the normalized double complex, with a truncation certificate."""
    a, b = window
    qs = normalize(X)
    nf = normalized_faces(X, qs)
    total, offsets = _total(X, qs, nf)
    tb = X.tail_bound
    if tb is not None and tb > b + 1:
        cert = TruncationCertificate("sound", (a, b), _level_min(qs), tb,
                                     "levels above %d start in total degree >= %s" % (X.N, tb))
    elif X.extend is not None:
        Y = X.extend(X.N + 1)
        big = realize_complex(Y)
        same = homology(total, (a, b)) == homology(big, (a, b))
        mode = "heuristic-stable" if same else "heuristic-unstable"
        cert = TruncationCertificate(mode, (a, b), _level_min(qs), tb,
                                     "compared truncations %d and %d" % (X.N, X.N + 1))
    else:
        cert = TruncationCertificate("heuristic-unchecked", (a, b), _level_min(qs), tb,
                                     "no tail bound and no extension available")
    aug = None
    if X.augmentation is not None:
        comps = {}
        T = X.aug_target
        for m in total.degrees():
            M = im.zeros(T.rank(m), total.rank(m))
            if (0, m) in offsets:
                c = offsets[(0, m)]
                M[:, c:c + qs[0].complex.rank(m)] = X.augmentation[m]
            comps[m] = M
        aug = ChainMap(total, T, comps)
    return Realization(total, cert, qs, offsets, aug)


def realize_complex(X):
    qs = normalize(X)
    return _total(X, qs, normalized_faces(X, qs))[0]


def collapse_check(X, window, allow_heuristic=False):
    """Is realize(X) -> X_{-1} a quasi-isomorphism on the window?

    Extra-degeneracy data, when present, is verified first and a failure is
    reported as the verdict.
    """
    if X.augmentation is None:
        raise ValueError("collapse check needs an augmented object")
    if X.extra is not None:
        v = check_extra_degeneracy(X)
        if not v:
            return Verdict(False, v.where, "extra degeneracy: " + v.message)
    R = realize(X, window)
    if not R.certificate.sound and not allow_heuristic:
        raise UnsoundWindow("truncation at %d is not sound for window %s (%s)"
                            % (X.N, tuple(window), R.certificate.mode))
    return window_quasi_iso(R.augmentation, window, {"certificate": R.certificate})


def window_quasi_iso(f, window, data=None):
    """Degreewise check that f induces isomorphisms H_m for m in the window."""
    a, b = window
    data = dict(data or {})
    HA, HB = homology(f.source, (a, b)), homology(f.target, (a, b))
    data.update(source_homology=HA, target_homology=HB)
    for m in range(a, b + 1):
        if not induces_iso_on_homology(f, m):
            return Verdict(False, m, "H_%d: %s -> %s is not an isomorphism"
                           % (m, GradedAbelianGroup.format_group(*HA[m]),
                              GradedAbelianGroup.format_group(*HB[m])), data)
    return Verdict(True, data=data)


# ---------------------------------------------------------------------------
# simple constructions


def constant(C, N, augment=True):
    """Constant simplicial object on C (all faces and degeneracies identities)."""
    I = _ident(C)
    faces = [[]] + [[I] * (n + 1) for n in range(1, N + 1)]
    degens = [[I] * (n + 1) for n in range(N)]
    aug = I if augment else None
    extra = [I] * (N + 1) if augment else None
    return SimplicialObject([C] * (N + 1), faces, degens, aug, extra, tail_bound=INF,
                            extend=lambda M: constant(C, M, augment), name="const")


def surjections(n, k):
    """Monotone surjections [n] -> [k] as value tuples, lexicographic order."""
    out = []
    for cut in combinations(range(1, n + 1), k):
        vals, cur, cuts = [], 0, set(cut)
        for i in range(n + 1):
            if i in cuts:
                cur += 1
            vals.append(cur)
        out.append(tuple(vals))
    return sorted(out)


def _gamma_index(C, n):
    idx, off = {}, 0
    for k in range(0, n + 1):
        if not C.rank(k):
            continue
        for s in surjections(n, k):
            idx[s] = (off, k)
            off += C.rank(k)
    return idx, off


def _operator(C, idx_src, idx_tgt, rank_src, rank_tgt, theta):
    """Matrix of theta^* : Gamma_n -> Gamma_m for theta : [m] -> [n] (as value tuple)."""
    M = im.zeros(rank_tgt, rank_src)
    for sigma, (off, k) in idx_src.items():
        comp = tuple(sigma[t] for t in theta)
        image = sorted(set(comp))
        tau = tuple(image.index(v) for v in comp)
        l = len(image) - 1
        if tau not in idx_tgt:
            continue
        toff, _ = idx_tgt[tau]
        r = C.rank(k)
        if l == k:
            M[toff:toff + r, off:off + r] = im.eye(r)
        elif l == k - 1 and image == list(range(1, k + 1)):
            M[toff:toff + C.rank(l), off:off + r] = C.d(k)
    return M


def dold_kan_gamma(C, N):
    """Simplicial abelian group with level n = ⊕ over surjections [n] -> [k] of C_k."""
    if any(C.rank(k) for k in C.degrees() if k < 0):
        raise ValueError("Dold-Kan input must be concentrated in nonnegative degrees")
    idx, ranks = [], []
    for n in range(N + 1):
        i, r = _gamma_index(C, n)
        idx.append(i)
        ranks.append(r)
    levels = [ChainComplex({0: r}) for r in ranks]
    faces, degens = [[]], []
    for n in range(1, N + 1):
        fl = []
        for i in range(n + 1):
            theta = tuple(t if t < i else t + 1 for t in range(n))
            M = _operator(C, idx[n], idx[n - 1], ranks[n], ranks[n - 1], theta)
            fl.append(ChainMap(levels[n], levels[n - 1], {0: M}))
        faces.append(fl)
    for n in range(N):
        sl = []
        for j in range(n + 1):
            theta = tuple(t if t <= j else t - 1 for t in range(n + 2))
            M = _operator(C, idx[n], idx[n + 1], ranks[n], ranks[n + 1], theta)
            sl.append(ChainMap(levels[n], levels[n + 1], {0: M}))
        degens.append(sl)
    above = [k for k in C.degrees() if k > N and C.rank(k)]
    tb = min(above) if above else INF
    return SimplicialObject(levels, faces, degens, tail_bound=tb,
                            extend=lambda M: dold_kan_gamma(C, M), name="gamma")


def dold_kan_normalize(A):
    """Moore complex: ∩_{i>=1} ker d_i with differential d_0, canonical basis."""
    for n, L in enumerate(A.levels):
        if any(L.rank(k) for k in L.degrees() if k != 0):
            raise ValueError("level %d is not concentrated in internal degree 0" % n)
    bases = []
    for n, L in enumerate(A.levels):
        r = L.rank(0)
        if n == 0:
            K = im.eye(r)
        else:
            stacked = im.vstack([f[0] for f in A.faces[n][1:]], r)
            K = im.kernel_basis(stacked) if r else im.zeros(0, 0)
            K = im.hermite_columns(K) if K.shape[1] else im.zeros(r, 0)
        bases.append(K)
    ranks = {n: K.shape[1] for n, K in enumerate(bases)}
    diffs = {}
    for n in range(1, A.N + 1):
        K, Kp = bases[n], bases[n - 1]
        if not K.shape[1] or not Kp.shape[1]:
            continue
        img = im.matmul(A.faces[n][0][0], K)
        cols = []
        for j in range(img.shape[1]):
            x = im.solve(Kp, img[:, j:j + 1])
            if x is None:
                raise ArithmeticError("d_0 does not preserve the Moore complex")
            cols.append(x)
        diffs[n] = im.hstack(cols, Kp.shape[1])
    return ChainComplex(ranks, diffs)
