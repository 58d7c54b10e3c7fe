"""Finitely generated free chain complexes over the integers.

Conventions: the differential lowers degree by one, ``d(n)`` is the matrix of
``C_n -> C_{n-1}`` acting on column vectors, and direct sums keep the order in
which summands are given.
"""

from dataclasses import dataclass, field
from itertools import product
from math import prod
from bisect import bisect_right

import numpy as np

from . import intmat as im
from .intmat import NonFreeCokernel  # noqa: F401  (re-exported)


class UnsoundWindow(ValueError):
    """A degree window too narrow for the homology it is asked to certify."""


@dataclass
class Verdict:
    """Outcome of a check: truthy iff ``ok``. ``where`` locates the first failure."""

    ok: bool
    where: object = None
    message: str = ""
    data: dict = field(default_factory=dict)

    def __bool__(self):
        return bool(self.ok)


OK = Verdict(True)


class ChainComplex:
    """Bounded, degreewise free complex of abelian groups.

    ``ranks`` maps degree to rank; ``diffs`` maps degree n to the matrix of
    d_n (shape rank(n-1) x rank(n)). Missing differentials are zero. Values are
    treated as immutable once built.
    """

    def __init__(self, ranks=None, diffs=None):
        self._ranks = {int(n): int(r) for n, r in dict(ranks or {}).items() if int(r) != 0}
        self._diffs = {}
        for n, M in dict(diffs or {}).items():
            n = int(n)
            shape = (self.rank(n - 1), self.rank(n))
            if isinstance(M, np.ndarray) and M.ndim == 2:
                A = M.astype(object)
            else:
                A = np.array(M, dtype=object)
                if A.size == 0:
                    A = im.zeros(*shape)
            if A.ndim != 2:
                A = A.reshape(shape)
            if A.size and not im.is_zero(A) or A.shape != shape:
                self._diffs[n] = im.asmat(A)

    # -- basic data -------------------------------------------------------
    def rank(self, n):
        return self._ranks.get(n, 0)

    def d(self, n):
        M = self._diffs.get(n)
        if M is None:
            return im.zeros(self.rank(n - 1), self.rank(n))
        return M

    @property
    def ranks(self):
        return dict(self._ranks)

    @property
    def lo(self):
        return min(self._ranks) if self._ranks else 0

    @property
    def hi(self):
        return max(self._ranks) if self._ranks else -1

    def degrees(self):
        return range(self.lo, self.hi + 1)

    def is_zero(self):
        return not self._ranks

    def total_rank(self):
        return sum(self._ranks.values())

    def euler_characteristic(self):
        return sum((-1) ** n * r for n, r in self._ranks.items())

    @classmethod
    def zero(cls):
        return cls({})

    @classmethod
    def sphere(cls, k, rank=1):
        """The complex Z^rank concentrated in degree k (Z[k] for rank 1)."""
        return cls({k: rank})

    @classmethod
    def from_map(cls, M, degree=0):
        """Two-term complex M : Z^cols (degree+1) -> Z^rows (degree)."""
        M = im.asmat(M)
        return cls({degree + 1: M.shape[1], degree: M.shape[0]}, {degree + 1: M})

    def __eq__(self, other):
        if not isinstance(other, ChainComplex):
            return NotImplemented
        if self._ranks != other._ranks:
            return False
        return all(np.array_equal(self.d(n), other.d(n)) for n in range(self.lo, self.hi + 2))

    def __hash__(self):
        return hash(tuple(sorted(self._ranks.items())))

    def __repr__(self):
        return "ChainComplex(%s)" % (sorted(self._ranks.items()),)


def validate_complex(C):
    """Check shapes and d∘d = 0; the report names the first failing degree."""
    for n in range(C.lo, C.hi + 2):
        if C.d(n).shape != (C.rank(n - 1), C.rank(n)):
            return Verdict(False, n, "d_%d has shape %s, expected %s"
                           % (n, C.d(n).shape, (C.rank(n - 1), C.rank(n))))
    for n in range(C.lo + 1, C.hi + 1):
        if not im.is_zero(im.matmul(C.d(n), C.d(n + 1))):
            return Verdict(False, n + 1, "d_%d d_%d != 0" % (n, n + 1))
    return OK


def _same(X, Y):
    return X is Y or X == Y


class ChainMap:
    """Degree-zero map of complexes; ``components[n]`` is target.rank(n) x source.rank(n)."""

    def __init__(self, source, target, components=None):
        self.source, self.target = source, target
        self._comp = {}
        for n, M in dict(components or {}).items():
            n = int(n)
            shape = (target.rank(n), source.rank(n))
            A = M if isinstance(M, np.ndarray) and M.ndim == 2 else np.array(M, dtype=object)
            if A.size == 0:
                if A.shape != shape:
                    A = im.zeros(*shape)
            elif A.ndim != 2:
                A = A.reshape(shape)
            A = A.astype(object)
            if A.shape != shape or not im.is_zero(A):
                self._comp[n] = A

    def __getitem__(self, n):
        M = self._comp.get(n)
        if M is None:
            return im.zeros(self.target.rank(n), self.source.rank(n))
        return M

    def degrees(self):
        lo = min(self.source.lo, self.target.lo)
        hi = max(self.source.hi, self.target.hi)
        return range(lo, hi + 1)

    @classmethod
    def identity(cls, C):
        return cls(C, C, {n: im.eye(C.rank(n)) for n in C.degrees()})

    @classmethod
    def zero(cls, A, B):
        return cls(A, B, {})

    def compose(self, other):
        """``self ∘ other``."""
        if other.target is not self.source and other.target != self.source:
            raise ValueError("cannot compose: target/source mismatch")
        return ChainMap(other.source, self.target,
                        {n: im.matmul(self[n], other[n]) for n in other.source.degrees()})

    def __matmul__(self, other):
        return self.compose(other)

    def _combine(self, other, sign):
        if not (_same(self.source, other.source) and _same(self.target, other.target)):
            raise ValueError("maps have different source/target")
        return ChainMap(self.source, self.target,
                        {n: self[n] + sign * other[n] for n in self.degrees()})

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __neg__(self):
        return self.scaled(-1)

    def scaled(self, c):
        return ChainMap(self.source, self.target, {n: c * self[n] for n in self.degrees()})

    def __eq__(self, other):
        if not isinstance(other, ChainMap):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and all(np.array_equal(self[n], other[n]) for n in self.degrees()))

    def is_isomorphism(self):
        return all(im.is_unimodular(self[n]) for n in self.degrees())

    def __repr__(self):
        return "ChainMap(%r -> %r)" % (self.source, self.target)


def validate_map(f):
    for n in f.degrees():
        if f[n].shape != (f.target.rank(n), f.source.rank(n)):
            return Verdict(False, n, "component %d has wrong shape %s" % (n, f[n].shape))
    for n in range(f.degrees().start, f.degrees().stop + 1):
        lhs = im.matmul(f.target.d(n), f[n])
        rhs = im.matmul(f[n - 1], f.source.d(n))
        if not np.array_equal(lhs, rhs):
            return Verdict(False, n, "d f != f d in degree %d" % n)
    return OK


# ---------------------------------------------------------------------------
# homology


class GradedAbelianGroup:
    """Finitely generated abelian groups by degree: free rank plus torsion chain."""

    def __init__(self, groups=None):
        self._g = {}
        for n, (free, tors) in dict(groups or {}).items():
            tors = im.canonical_torsion(tors)
            if free or tors:
                self._g[int(n)] = (int(free), tors)

    def __getitem__(self, n):
        return self._g.get(n, (0, ()))

    def free_rank(self, n):
        return self[n][0]

    def torsion(self, n):
        return self[n][1]

    def degrees(self):
        return sorted(self._g)

    def is_zero(self):
        return not self._g

    def restrict(self, a, b):
        return GradedAbelianGroup({n: g for n, g in self._g.items() if a <= n <= b})

    def shifted(self, k):
        return GradedAbelianGroup({n + k: g for n, g in self._g.items()})

    def __eq__(self, other):
        if not isinstance(other, GradedAbelianGroup):
            return NotImplemented
        return self._g == other._g

    def __hash__(self):
        return hash(tuple(sorted(self._g.items())))

    @staticmethod
    def format_group(free, tors):
        parts = []
        if free:
            parts.append("Z" if free == 1 else "Z^%d" % free)
        parts += ["Z/%d" % t for t in tors]
        return " + ".join(parts) if parts else "0"

    def to_json(self):
        return {str(n): {"free": f, "torsion": list(t)} for n, (f, t) in sorted(self._g.items())}

    def __repr__(self):
        if not self._g:
            return "GradedAbelianGroup(0)"
        body = ", ".join("H_%d = %s" % (n, self.format_group(*self._g[n])) for n in sorted(self._g))
        return "GradedAbelianGroup(%s)" % body


def _window(C, window):
    if window is None:
        return C.lo, C.hi
    return int(window[0]), int(window[1])


def homology(C, window=None):
    a, b = _window(C, window)
    groups = {}
    ranks = {}

    def factors(n):
        if n not in ranks:
            M = C.d(n)
            ranks[n] = im.invariant_factors(M) if M.size else []
        return ranks[n]

    for n in range(a, b + 1):
        if C.rank(n) == 0:
            continue
        out_rank = len(factors(n))
        inc = factors(n + 1)
        free = C.rank(n) - out_rank - len(inc)
        groups[n] = (free, [x for x in inc if x > 1])
    return GradedAbelianGroup(groups)


# ---------------------------------------------------------------------------
# tensor products


def _kron_all(mats):
    out = im.eye(1)
    for M in mats:
        out = im.kron(out, M)
    return out


class TensorProduct:
    """Koszul tensor product of a list of complexes with an explicit basis.

    Basis of degree n: blocks indexed by degree tuples in lexicographic order,
    each block row-major in the factor indices. For two factors this is the
    "p ascending" ordering of ``tensor``; the empty product is Z[0].
    """

    def __init__(self, factors):
        self.factors = list(factors)
        supports = [[d for d in F.degrees() if F.rank(d)] for F in self.factors]
        self._offset = {}
        self._size = {}
        self.blocks = {}
        ranks = {}
        for degs in product(*supports):
            n = sum(degs)
            size = prod(F.rank(d) for F, d in zip(self.factors, degs))
            self._offset[degs] = ranks.get(n, 0)
            self._size[degs] = size
            self.blocks.setdefault(n, []).append(degs)
            ranks[n] = ranks.get(n, 0) + size
        diffs = {}
        for n, blist in self.blocks.items():
            if n - 1 not in ranks:
                continue
            M = im.zeros(ranks[n - 1], ranks[n])
            for degs in blist:
                off = self._offset[degs]
                size = self._size[degs]
                for j, F in enumerate(self.factors):
                    if not F.rank(degs[j] - 1):
                        continue
                    tdegs = degs[:j] + (degs[j] - 1,) + degs[j + 1:]
                    toff = self._offset[tdegs]
                    before = prod(G.rank(d) for G, d in zip(self.factors[:j], degs[:j]))
                    after = prod(G.rank(d) for G, d in zip(self.factors[j + 1:], degs[j + 1:]))
                    sign = -1 if sum(degs[:j]) % 2 else 1
                    sub = im.kron(im.kron(im.eye(before), F.d(degs[j])), im.eye(after))
                    M[toff:toff + self._size[tdegs], off:off + size] += sign * sub
            diffs[n] = M
        self.complex = ChainComplex(ranks, diffs)
        self._starts = {n: [self._offset[d] for d in bl] for n, bl in self.blocks.items()}

    def offset(self, degs):
        return self._offset.get(tuple(degs))

    def block_size(self, degs):
        return self._size.get(tuple(degs), 0)

    def index(self, degs, idxs):
        off = self._offset[tuple(degs)]
        k = 0
        for F, d, i in zip(self.factors, degs, idxs):
            k = k * F.rank(d) + i
        return off + k

    def key(self, n, index):
        """Inverse of ``index``: (degree tuple, index tuple) of a basis element."""
        pos = bisect_right(self._starts[n], index) - 1
        degs = self.blocks[n][pos]
        r = index - self._offset[degs]
        idxs = []
        for F, d in reversed(list(zip(self.factors, degs))):
            r, i = divmod(r, F.rank(d))
            idxs.append(i)
        return degs, tuple(reversed(idxs))


def tensor(A, B):
    return TensorProduct([A, B]).complex


def tensor_many(factors):
    return TensorProduct(factors).complex


def tensor_maps(maps, source=None, target=None):
    """f1 ⊗ ... ⊗ fk for degree-zero maps, between the flat tensor bases."""
    src = source or TensorProduct([f.source for f in maps])
    tgt = target or TensorProduct([f.target for f in maps])
    comps = {}
    for n, blist in src.blocks.items():
        M = im.zeros(tgt.complex.rank(n), src.complex.rank(n))
        for degs in blist:
            toff = tgt.offset(degs)
            if toff is None:
                continue
            sub = _kron_all([f[d] for f, d in zip(maps, degs)])
            M[toff:toff + tgt.block_size(degs), src.offset(degs):src.offset(degs) + src.block_size(degs)] = sub
        comps[n] = M
    return ChainMap(src.complex, tgt.complex, comps)


def apply_local(src, pos, width, f, tgt):
    """id ⊗ f ⊗ id where f eats factors pos..pos+width-1 of ``src``.

    ``f.source`` must be the flat tensor of those factors (Z[0] when width is
    0, which inserts f's image as a new factor); ``tgt`` has f.target in
    their place.
    """
    local = tensor_product(src.factors[pos:pos + width])
    if not _same(local.complex, f.source):
        raise ValueError("local factors do not match the map's source")
    comps = {}
    for n, blist in src.blocks.items():
        M = im.zeros(tgt.complex.rank(n), src.complex.rank(n))
        for degs in blist:
            ldegs = degs[pos:pos + width]
            ld = sum(ldegs)
            F = f[ld]
            lo_ = local.offset(ldegs)
            sub = F[:, lo_:lo_ + local.block_size(ldegs)]
            if im.is_zero(sub):
                continue
            before = prod(G.rank(d) for G, d in zip(src.factors[:pos], degs[:pos]))
            after = prod(G.rank(d) for G, d in zip(src.factors[pos + width:], degs[pos + width:]))
            tdegs = degs[:pos] + (ld,) + degs[pos + width:]
            toff = tgt.offset(tdegs)
            if toff is None:
                continue
            # f.target may have several blocks only when it is itself a product;
            # here tgt's factor at pos is f.target, a single block per degree
            blk = im.kron(im.kron(im.eye(before), sub), im.eye(after))
            off = src.offset(degs)
            M[toff:toff + blk.shape[0], off:off + blk.shape[1]] += blk
        comps[n] = M
    return ChainMap(src.complex, tgt.complex, comps)


def swap_map(A, B):
    """Symmetry A ⊗ B -> B ⊗ A, a ⊗ b ↦ (-1)^{|a||b|} b ⊗ a."""
    src, tgt = TensorProduct([A, B]), TensorProduct([B, A])
    comps = {}
    for n in src.complex.degrees():
        M = im.zeros(tgt.complex.rank(n), src.complex.rank(n))
        for k in range(src.complex.rank(n)):
            (p, q), (i, j) = src.key(n, k)
            M[tgt.index((q, p), (j, i)), k] = -1 if (p * q) % 2 else 1
        comps[n] = M
    return ChainMap(src.complex, tgt.complex, comps)


def shift(C, k):
    """C[k]: degrees moved up by k, differential multiplied by (-1)^k."""
    s = -1 if k % 2 else 1
    return ChainComplex({n + k: r for n, r in C.ranks.items()},
                        {n + k: s * C.d(n) for n in range(C.lo, C.hi + 2)})


def shift_map(f, k):
    return ChainMap(shift(f.source, k), shift(f.target, k), {n + k: f[n] for n in f.degrees()})


# ---------------------------------------------------------------------------
# direct sums and cones


class DirectSum:
    """Direct sum with summands in the given order; keeps block offsets."""

    def __init__(self, summands):
        self.summands = list(summands)
        ranks, self._off = {}, {}
        for i, S in enumerate(self.summands):
            for n in S.degrees():
                self._off[(i, n)] = ranks.get(n, 0)
                ranks[n] = ranks.get(n, 0) + S.rank(n)
        diffs = {}
        for n in ranks:
            M = im.zeros(ranks.get(n - 1, 0), ranks[n])
            for i, S in enumerate(self.summands):
                if S.rank(n) and S.rank(n - 1):
                    r, c = self._off[(i, n - 1)], self._off[(i, n)]
                    M[r:r + S.rank(n - 1), c:c + S.rank(n)] = S.d(n)
            diffs[n] = M
        self.complex = ChainComplex(ranks, diffs)

    def offset(self, i, n):
        return self._off.get((i, n), 0)

    def inclusion(self, i):
        S = self.summands[i]
        comps = {}
        for n in S.degrees():
            M = im.zeros(self.complex.rank(n), S.rank(n))
            o = self.offset(i, n)
            M[o:o + S.rank(n), :] = im.eye(S.rank(n))
            comps[n] = M
        return ChainMap(S, self.complex, comps)

    def projection(self, i):
        S = self.summands[i]
        comps = {}
        for n in S.degrees():
            M = im.zeros(S.rank(n), self.complex.rank(n))
            o = self.offset(i, n)
            M[:, o:o + S.rank(n)] = im.eye(S.rank(n))
            comps[n] = M
        return ChainMap(self.complex, S, comps)


def assemble(src, tgt, blocks):
    """Map between direct sums from blocks {(j_src, i_tgt): ChainMap or {n: matrix}}."""
    comps = {}
    degs = set(src.complex.degrees()) | set(tgt.complex.degrees())
    for n in degs:
        M = im.zeros(tgt.complex.rank(n), src.complex.rank(n))
        for (j, i), f in blocks.items():
            S, T = src.summands[j], tgt.summands[i]
            if not S.rank(n) or not T.rank(n):
                continue
            F = f[n] if isinstance(f, ChainMap) else f.get(n)
            if F is None:
                continue
            r, c = tgt.offset(i, n), src.offset(j, n)
            M[r:r + T.rank(n), c:c + S.rank(n)] += F
        comps[n] = M
    return ChainMap(src.complex, tgt.complex, comps)


def direct_sum(complexes):
    return DirectSum(complexes).complex


def direct_sum_maps(maps):
    src = DirectSum([f.source for f in maps])
    tgt = DirectSum([f.target for f in maps])
    return assemble(src, tgt, {(i, i): f for i, f in enumerate(maps)})


@dataclass
class Cone:
    complex: ChainComplex
    inclusion: ChainMap     # target -> cone
    projection: ChainMap    # cone -> source[1]


def mapping_cone(f):
    """cone(f)_n = B_n ⊕ A_{n-1} with d = [[d_B, f], [0, -d_A]]."""
    A, B = f.source, f.target
    lo, hi = cone_support(f)
    ranks = {n: B.rank(n) + A.rank(n - 1) for n in range(lo, hi + 1)}
    diffs = {}
    for n in range(lo, hi + 1):
        diffs[n] = im.block([[B.d(n), f[n - 1]],
                             [im.zeros(A.rank(n - 2), B.rank(n)), -A.d(n - 1)]])
    C = ChainComplex(ranks, diffs)
    A1 = shift(A, 1)
    inc = {n: im.vstack([im.eye(B.rank(n)), im.zeros(A.rank(n - 1), B.rank(n))], B.rank(n))
           for n in range(lo, hi + 1)}
    proj = {n: im.hstack([im.zeros(A.rank(n - 1), B.rank(n)), im.eye(A.rank(n - 1))], A.rank(n - 1))
            for n in range(lo, hi + 1)}
    return Cone(C, ChainMap(B, C, inc), ChainMap(C, A1, proj))


def cone_support(f):
    A, B = f.source, f.target
    degs = [n for n in B.degrees() if B.rank(n)] + [n + 1 for n in A.degrees() if A.rank(n)]
    if not degs:
        return 0, -1
    return min(degs), max(degs)


def is_quasi_iso(f, window=None):
    """True iff the cone of f is acyclic.

    ``window`` must cover the whole support of the cone; anything narrower
    could hide homology and is rejected with ``UnsoundWindow``.
    """
    lo, hi = cone_support(f)
    if window is None:
        window = (lo, hi)
    a, b = window
    if lo <= hi and (a > lo or b < hi):
        raise UnsoundWindow("window [%d, %d] does not cover cone support [%d, %d]" % (a, b, lo, hi))
    return cone_acyclic_on(f, (a, b))


def cone_acyclic_on(f, window):
    """Cone homology vanishes on the window (no soundness check)."""
    H = homology(mapping_cone(f).complex, window)
    if H.is_zero():
        return Verdict(True, data={"cone_homology": H})
    n = H.degrees()[0]
    return Verdict(False, n, "cone has H_%d = %s" % (n, GradedAbelianGroup.format_group(*H[n])),
                   {"cone_homology": H})


def is_cofibration(f):
    """Degreewise injective with free cokernel (all invariant factors 1)."""
    for n in f.degrees():
        M = f[n]
        if M.shape[1] == 0:
            continue
        d = im.invariant_factors(M)
        if len(d) < M.shape[1]:
            return Verdict(False, n, "component %d is not injective" % n)
        bad = [x for x in d if x != 1]
        if bad:
            return Verdict(False, n, "cokernel in degree %d has torsion %s" % (n, bad),
                           {"torsion": bad})
    return OK


# ---------------------------------------------------------------------------
# quotients


class Quotient:
    """Free presentation of the cokernel of a chain map ``f : A -> B``.

    ``complex`` has basis the chosen free complement; ``quotient`` is the
    chain map B -> complex and ``section[n]`` lifts degree-n classes to B_n.
    """

    def __init__(self, f, where=None):
        B = f.target
        self.target = B
        self.quotient_m, self.section = {}, {}
        ranks = {}
        for n in B.degrees():
            ck = im.cokernel(f[n], B.rank(n))
            if not ck.is_free:
                raise NonFreeCokernel(ck.torsion, where if where is not None else "degree %d" % n)
            self.quotient_m[n], self.section[n] = ck.quotient, ck.section
            ranks[n] = ck.rank
        diffs = {}
        for n in B.degrees():
            if n - 1 in self.quotient_m:
                diffs[n] = im.matmul(im.matmul(self.quotient_m[n - 1], B.d(n)), self.section[n])
        self.complex = ChainComplex(ranks, diffs)
        self.quotient = ChainMap(B, self.complex, self.quotient_m)

    def lift(self, n):
        return self.section.get(n, im.zeros(self.target.rank(n), 0))

    def induced(self, g, other):
        """Map on quotients induced by g : B -> B' (other is the Quotient of B')."""
        comps = {}
        for n in self.complex.degrees():
            comps[n] = im.matmul(im.matmul(other.quotient[n], g[n]), self.lift(n))
        return ChainMap(self.complex, other.complex, comps)

    def descend(self, g):
        """Map out of the quotient induced by g : B -> X (g must kill im f)."""
        return ChainMap(self.complex, g.target,
                        {n: im.matmul(g[n], self.lift(n)) for n in self.complex.degrees()})


def present_cokernel(f, where=None):
    return Quotient(f, where)


# ---------------------------------------------------------------------------
# induced maps on homology (direct route, independent of cones)


def _cycle_coords(C, n):
    """Saturated cycle basis K of C_n and a left inverse L (L K = I)."""
    K = im.kernel_basis(C.d(n)) if C.rank(n) else im.zeros(0, 0)
    if K.shape[1] == 0:
        return K, im.zeros(0, C.rank(n))
    snf = im.smith_normal_form(K)
    k = K.shape[1]
    # U K V = [I; 0]  =>  (V [I 0] U) K = I
    L = im.matmul(snf.V, snf.U[:k, :])
    return K, L


def induced_map_on_homology(f, n):
    """Presentations Z^a/RA, Z^b/RB of H_n and the matrix F of H_n(f)."""
    KA, LA = _cycle_coords(f.source, n)
    KB, LB = _cycle_coords(f.target, n)
    RA = im.matmul(LA, f.source.d(n + 1)) if KA.shape[1] else im.zeros(0, f.source.rank(n + 1))
    RB = im.matmul(LB, f.target.d(n + 1)) if KB.shape[1] else im.zeros(0, f.target.rank(n + 1))
    F = im.matmul(im.matmul(LB, f[n]), KA) if KB.shape[1] and KA.shape[1] else im.zeros(KB.shape[1], KA.shape[1])
    return RA, RB, F


def induces_iso_on_homology(f, n):
    RA, RB, F = induced_map_on_homology(f, n)
    kA, kB = F.shape[1], F.shape[0]
    stacked = im.hstack([F, RB], kB)
    if kB:
        d = im.invariant_factors(stacked) if stacked.shape[1] else []
        if len(d) < kB or any(x != 1 for x in d):
            return False
    if kA == 0:
        return True
    if kB == 0:
        ker = im.eye(kA)
    else:
        ker = im.kernel_basis(stacked)[:kA, :]
    for j in range(ker.shape[1]):
        if im.solve(RA, ker[:, j:j + 1]) is None:
            return False
    return True


_TP_CACHE = {}
_TP_CACHE_MAX = 4096


def tensor_product(factors):
    """Cached ``TensorProduct``; the cache keys on object identity."""
    key = tuple(id(F) for F in factors)
    hit = _TP_CACHE.get(key)
    if hit is not None and all(a is b for a, b in zip(hit.factors, factors)):
        return hit
    tp = TensorProduct(factors)
    if len(_TP_CACHE) >= _TP_CACHE_MAX:
        _TP_CACHE.clear()
    _TP_CACHE[key] = tp
    return tp


def distribute(summands, other, side="left"):
    """Permutation isomorphism (⊕ S_i) ⊗ H  ->  ⊕ (S_i ⊗ H)  (side="left"),
    or H ⊗ (⊕ S_i) -> ⊕ (H ⊗ S_i) (side="right").

    Returns (iso, source TensorProduct, target DirectSum).
    """
    ds = DirectSum(summands)
    if side == "left":
        src = tensor_product([ds.complex, other])
        parts = [tensor_product([S, other]) for S in summands]
    else:
        src = tensor_product([other, ds.complex])
        parts = [tensor_product([other, S]) for S in summands]
    tgt = DirectSum([p.complex for p in parts])
    comps = {}
    for n in src.complex.degrees():
        M = im.zeros(tgt.complex.rank(n), src.complex.rank(n))
        for k in range(src.complex.rank(n)):
            degs, idxs = src.key(n, k)
            sdeg = degs[0] if side == "left" else degs[1]
            sidx = idxs[0] if side == "left" else idxs[1]
            for i, S in enumerate(summands):
                o = ds.offset(i, sdeg)
                if S.rank(sdeg) and o <= sidx < o + S.rank(sdeg):
                    if side == "left":
                        row = parts[i].index(degs, (sidx - o, idxs[1]))
                    else:
                        row = parts[i].index(degs, (idxs[0], sidx - o))
                    M[tgt.offset(i, n) + row, k] = 1
                    break
        comps[n] = M
    return ChainMap(src.complex, tgt.complex, comps), src, tgt
