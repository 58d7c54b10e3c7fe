"""Independent reference computations used by the tests.

None of these call the package's Smith normal form or homology code.
"""

from fractions import Fraction
from itertools import combinations
from math import gcd, comb

from hwcolim.intmat import canonical_torsion


def det(rows):
    """Exact determinant by fraction-valued Gaussian elimination."""
    M = [[Fraction(int(x)) for x in r] for r in rows]
    n = len(M)
    out = Fraction(1)
    for i in range(n):
        p = next((r for r in range(i, n) if M[r][i] != 0), None)
        if p is None:
            return 0
        if p != i:
            M[i], M[p] = M[p], M[i]
            out = -out
        out *= M[i][i]
        for r in range(i + 1, n):
            f = M[r][i] / M[i][i]
            for c in range(i, n):
                M[r][c] -= f * M[i][c]
    return int(out)


def determinantal_divisors(A):
    """d_k = gcd of all k x k minors; invariant factors are d_k / d_{k-1}."""
    A = [[int(x) for x in row] for row in A]
    m = len(A)
    n = len(A[0]) if m else 0
    out = []
    for k in range(1, min(m, n) + 1):
        g = 0
        for rs in combinations(range(m), k):
            for cs in combinations(range(n), k):
                g = gcd(g, det([[A[r][c] for c in cs] for r in rs]))
        if g == 0:
            break
        out.append(g)
    return out


def invariant_factors_by_minors(A):
    d = determinantal_divisors(A)
    return [d[0]] + [d[i] // d[i - 1] for i in range(1, len(d))] if d else []


def cyclic_parts(group):
    free, tors = group
    return [0] * free + list(tors)      # 0 stands for Z


def _tensor_cyclic(a, b):
    if a == 0:
        return b
    if b == 0:
        return a
    return gcd(a, b)


def kunneth(HA, HB):
    """Predicted homology of A ⊗ B from H(A) and H(B) as {n: (free, torsion)}."""
    out = {}
    for p in HA.degrees():
        for q in HB.degrees():
            for a in cyclic_parts(HA[p]):
                for b in cyclic_parts(HB[q]):
                    t = _tensor_cyclic(a, b)
                    out.setdefault(p + q, []).append(t)
                    if a and b:                       # Tor(Z/a, Z/b) = Z/gcd
                        out.setdefault(p + q + 1, []).append(gcd(a, b))
    res = {}
    for n, parts in out.items():
        free = sum(1 for x in parts if x == 0)
        tors = canonical_torsion([x for x in parts if x > 1])
        if free or tors:
            res[n] = (free, tors)
    return res


def gamma_rank(ranks, n):
    """rank of Γ(C)_n = Σ_k binom(n, k) rank C_k."""
    return sum(comb(n, k) * r for k, r in ranks.items() if 0 <= k <= n)


def nerve_counts_by_chains(I, n):
    """Number of composable strings of n nonidentity morphisms, by brute force."""
    nonid = I.nonidentity()
    if n == 0:
        return len(I.objects)
    strings = [[f] for f in nonid]
    for _ in range(n - 1):
        strings = [s + [g] for s in strings for g in nonid if I.source(g) == I.target(s[-1])]
    return len(strings)
