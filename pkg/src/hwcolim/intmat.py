"""Exact integer matrix arithmetic.

Matrices are numpy arrays of dtype ``object`` holding Python ints, so every
product and every Smith normal form is exact no matter how large entries get.
The elimination routines work on plain lists of rows.
"""

from math import gcd

import numpy as np

_INT64_SAFE = 2 ** 62


class NonFreeCokernel(ArithmeticError):
    """Raised when a quotient that must be presented as a free module has torsion."""

    def __init__(self, torsion, where=None):
        self.torsion = tuple(torsion)
        self.where = where
        msg = "cokernel has torsion %s" % (list(self.torsion),)
        if where is not None:
            msg += " at %s" % (where,)
        super().__init__(msg)


def zeros(m, n):
    return np.zeros((m, n), dtype=object)


def eye(n):
    out = zeros(n, n)
    for i in range(n):
        out[i, i] = 1
    return out


def asmat(data, shape=None):
    """Coerce nested lists / arrays to an object matrix of Python ints."""
    if isinstance(data, np.ndarray) and data.dtype == object and data.ndim == 2:
        out = data.copy()
    else:
        arr = np.array(data, dtype=object)
        if arr.size == 0:
            arr = arr.reshape(shape if shape is not None else (0, 0))
        out = arr
    if out.ndim == 1:
        if shape is None:
            raise ValueError("1-d data needs an explicit shape")
        out = out.reshape(shape)
    if shape is not None and tuple(out.shape) != tuple(shape):
        if out.size == 0 and shape[0] * shape[1] == 0:
            return zeros(*shape)
        raise ValueError("matrix shape %s, expected %s" % (out.shape, shape))
    flat = out.reshape(-1)
    for k in range(flat.size):
        flat[k] = int(flat[k])
    return out


def _max_abs(A):
    if A.size == 0:
        return 0
    return max(abs(int(x)) for x in A.reshape(-1))


def matmul(A, B):
    """Exact product; uses an int64 fast path when no overflow is possible."""
    m, k = A.shape
    k2, n = B.shape
    if k != k2:
        raise ValueError("shape mismatch %s @ %s" % (A.shape, B.shape))
    if m == 0 or n == 0 or k == 0:
        return zeros(m, n)
    a, b = _max_abs(A), _max_abs(B)
    if a == 0 or b == 0:
        return zeros(m, n)
    if a * b * k < _INT64_SAFE:
        prod = A.astype(np.int64) @ B.astype(np.int64)
        return prod.astype(object)
    return np.dot(A, B)


def kron(A, B):
    m1, n1 = A.shape
    m2, n2 = B.shape
    out = A[:, None, :, None] * B[None, :, None, :]
    return np.asarray(out, dtype=object).reshape(m1 * m2, n1 * n2)


def is_zero(A):
    return all(x == 0 for x in A.reshape(-1))


def to_lists(A):
    return [[int(x) for x in row] for row in A]


# ---------------------------------------------------------------------------
# Smith normal form


class SmithForm:
    """Result of ``smith_normal_form``: ``U @ A @ V == D``.

    ``Uinv`` and ``Vinv`` are the exact inverses of the unimodular transforms.
    ``diagonal`` lists the nonzero invariant factors, each dividing the next.
    """

    def __init__(self, D, U, V, Uinv, Vinv, diagonal):
        self.D, self.U, self.V, self.Uinv, self.Vinv = D, U, V, Uinv, Vinv
        self.diagonal = diagonal

    @property
    def rank(self):
        return len(self.diagonal)


def _identity_rows(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def smith_normal_form(A, transforms=True):
    A = asmat(A) if not isinstance(A, np.ndarray) else A
    m, n = A.shape
    M = [[int(x) for x in row] for row in A]
    if transforms:
        U, Ui = _identity_rows(m), _identity_rows(m)
        V, Vi = _identity_rows(n), _identity_rows(n)

    def row_add(i, k, c):  # row_i += c * row_k
        Mi, Mk = M[i], M[k]
        for j in range(n):
            if Mk[j]:
                Mi[j] += c * Mk[j]
        if transforms:
            Ui_, Uk = U[i], U[k]
            for j in range(m):
                if Uk[j]:
                    Ui_[j] += c * Uk[j]
            for row in Ui:
                if row[i]:
                    row[k] -= c * row[i]

    def row_swap(i, k):
        M[i], M[k] = M[k], M[i]
        if transforms:
            U[i], U[k] = U[k], U[i]
            for row in Ui:
                row[i], row[k] = row[k], row[i]

    def row_neg(i):
        M[i] = [-x for x in M[i]]
        if transforms:
            U[i] = [-x for x in U[i]]
            for row in Ui:
                row[i] = -row[i]

    def col_add(j, k, c):  # col_j += c * col_k
        for row in M:
            if row[k]:
                row[j] += c * row[k]
        if transforms:
            for row in V:
                if row[k]:
                    row[j] += c * row[k]
            Vk, Vj = Vi[k], Vi[j]
            for t in range(n):
                if Vj[t]:
                    Vk[t] -= c * Vj[t]

    def col_swap(j, k):
        for row in M:
            row[j], row[k] = row[k], row[j]
        if transforms:
            for row in V:
                row[j], row[k] = row[k], row[j]
            Vi[j], Vi[k] = Vi[k], Vi[j]

    diagonal = []
    active = n  # columns >= active are known zero below the current pivot row
    t = 0
    while t < min(m, active):
        # find a nonzero column among t..active-1, pushing zero columns to the end
        j = t
        found = False
        while j < active:
            if any(M[i][j] for i in range(t, m)):
                found = True
                break
            active -= 1
            if j != active:
                col_swap(j, active)
        if not found:
            break
        if j != t:
            col_swap(j, t)
        while True:
            # pivot = smallest nonzero in column t (rows >= t)
            best = None
            for i in range(t, m):
                v = M[i][t]
                if v and (best is None or abs(v) < abs(M[best][t])):
                    best = i
            if best is None:
                # column t became zero: look along row t instead
                bj = None
                for jj in range(t + 1, n):
                    v = M[t][jj]
                    if v and (bj is None or abs(v) < abs(M[t][bj])):
                        bj = jj
                col_swap(t, bj)
                continue
            if best != t:
                row_swap(best, t)
            p = M[t][t]
            clean = True
            for i in range(t + 1, m):
                v = M[i][t]
                if v:
                    row_add(i, t, -(v // p))
                    if M[i][t]:
                        clean = False
            if not clean:
                continue
            for jj in range(t + 1, n):
                v = M[t][jj]
                if v:
                    col_add(jj, t, -(v // p))
                    if M[t][jj]:
                        clean = False
            if not clean:
                # move the smallest remainder of row t into the pivot column
                bj = min((jj for jj in range(t + 1, n) if M[t][jj]), key=lambda jj: abs(M[t][jj]))
                col_swap(t, bj)
                continue
            if abs(p) != 1:
                bad = None
                for i in range(t + 1, m):
                    Mi = M[i]
                    for jj in range(t + 1, n):
                        if Mi[jj] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is not None:
                    row_add(t, bad, 1)
                    continue
            break
        if M[t][t] < 0:
            row_neg(t)
        diagonal.append(M[t][t])
        t += 1

    D = asmat(M, (m, n)) if m and n else zeros(m, n)
    if transforms:
        return SmithForm(D, asmat(U, (m, m)) if m else zeros(0, 0), asmat(V, (n, n)) if n else zeros(0, 0),
                         asmat(Ui, (m, m)) if m else zeros(0, 0), asmat(Vi, (n, n)) if n else zeros(0, 0),
                         diagonal)
    return SmithForm(D, None, None, None, None, diagonal)


def invariant_factors(A):
    """Nonzero invariant factors of A (a divisibility chain)."""
    return smith_normal_form(A, transforms=False).diagonal


def canonical_torsion(values):
    """Turn any list of positive diagonal entries into the divisibility chain of the group."""
    vals = [abs(int(v)) for v in values if abs(int(v)) > 1]
    # repeated (gcd, lcm) exchange converges to the invariant-factor chain
    changed = True
    while changed:
        changed = False
        vals.sort()
        for i in range(len(vals)):
            for j in range(i + 1, len(vals)):
                a, b = vals[i], vals[j]
                if b % a:
                    g = gcd(a, b)
                    vals[i], vals[j] = g, a * b // g
                    changed = True
        vals = [v for v in vals if v > 1]
    return tuple(sorted(vals))


def rank(A):
    if A.size == 0:
        return 0
    return len(invariant_factors(A))


def kernel_basis(A):
    """Columns form a basis of the (saturated) integer kernel of A."""
    m, n = A.shape
    if n == 0:
        return zeros(0, 0)
    if m == 0:
        return eye(n)
    snf = smith_normal_form(A)
    return snf.V[:, snf.rank:]


class Cokernel:
    """Free presentation of ``Z^m / im(A)``.

    ``quotient`` is (m-r) x m and kills im(A); ``section`` is m x (m-r) with
    ``quotient @ section == I``. ``torsion`` lists invariant factors > 1.
    """

    def __init__(self, quotient, section, torsion):
        self.quotient, self.section, self.torsion = quotient, section, tuple(torsion)

    @property
    def is_free(self):
        return not self.torsion

    @property
    def rank(self):
        return self.quotient.shape[0]


def cokernel(A, m=None):
    if m is None:
        m = A.shape[0]
    if A.size == 0:
        return Cokernel(eye(m), eye(m), ())
    snf = smith_normal_form(A)
    r = snf.rank
    torsion = [d for d in snf.diagonal if d != 1]
    return Cokernel(snf.U[r:, :], snf.Uinv[:, r:], torsion)


def solve(A, b):
    """An integer x with A @ x == b, or None if no integer solution exists."""
    m, n = A.shape
    b = asmat(b, (m, 1)) if not (isinstance(b, np.ndarray) and b.ndim == 2) else b
    if m == 0:
        return zeros(n, 1)
    if n == 0:
        return zeros(0, 1) if is_zero(b) else None
    snf = smith_normal_form(A)
    c = matmul(snf.U, b)
    y = zeros(n, 1)
    for i, d in enumerate(snf.diagonal):
        if c[i, 0] % d:
            return None
        y[i, 0] = c[i, 0] // d
    for i in range(snf.rank, m):
        if c[i, 0] != 0:
            return None
    return matmul(snf.V, y)


def is_unimodular(A):
    m, n = A.shape
    if m != n:
        return False
    if m == 0:
        return True
    d = invariant_factors(A)
    return len(d) == m and all(x == 1 for x in d)


def hermite_columns(K):
    """Canonical basis for the lattice spanned by the columns of K.

    Column-style Hermite normal form: pivots move strictly down, are positive,
    and entries to the left of each pivot are reduced into [0, pivot).
    Zero columns are dropped.
    """
    m, n = K.shape
    cols = [[int(K[i, j]) for i in range(m)] for j in range(n)]
    out = []
    row = 0
    while cols and row < m:
        nz = [c for c in cols if c[row]]
        if not nz:
            row += 1
            continue
        rest = [c for c in cols if not c[row]]
        while len(nz) > 1:
            nz.sort(key=lambda c: abs(c[row]))
            piv = nz[0]
            new = [piv]
            for c in nz[1:]:
                q = c[row] // piv[row]
                c = [x - q * y for x, y in zip(c, piv)]
                if c[row]:
                    new.append(c)
                else:
                    rest.append(c)
            nz = new
        piv = nz[0]
        if piv[row] < 0:
            piv = [-x for x in piv]
        out.append(piv)
        cols = [c for c in rest if any(c)]
        row += 1
    # reduce earlier pivots' columns against later pivots
    pivrows = [next(i for i, x in enumerate(c) if x) for c in out]
    for k in range(len(out)):
        for j in range(k):
            pr = pivrows[k]
            q = out[j][pr] // out[k][pr]
            if q:
                out[j] = [x - q * y for x, y in zip(out[j], out[k])]
    if not out:
        return zeros(m, 0)
    return asmat([[c[i] for c in out] for i in range(m)], (m, len(out)))


def block(rows):
    """Assemble a block matrix from a list of lists of matrices."""
    if not rows:
        return zeros(0, 0)
    return np.block([[np.asarray(b, dtype=object) for b in r] for r in rows]).astype(object)


def vstack(mats, ncols):
    mats = [m for m in mats if m.shape[0]]
    if not mats:
        return zeros(0, ncols)
    return np.vstack(mats).astype(object)


def hstack(mats, nrows):
    mats = [m for m in mats if m.shape[1]]
    if not mats:
        return zeros(nrows, 0)
    return np.hstack(mats).astype(object)
