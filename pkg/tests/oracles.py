"""Independent reference implementations used to freeze expected values.

Everything here works over the integers with textbook algorithms and shares no
code with the package.
"""
import itertools
from math import gcd


def xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def int_hnf(cols, p, n):
    """Upper-triangular column HNF over Z of span(cols) + p^n Z^3, off-diagonals in [0, pivot)."""
    work = [list(c) for c in cols] + [[p**n if i == j else 0 for i in range(3)] for j in range(3)]
    piv = [None] * 3
    for i in (2, 1, 0):
        active = [c for c in work if c[i] != 0]
        rest = [c for c in work if c[i] == 0]
        while len(active) > 1:
            active.sort(key=lambda c: abs(c[i]))
            a = active[0]
            nxt = [a]
            for c in active[1:]:
                q = c[i] // a[i]
                c = [x - q * y for x, y in zip(c, a)]
                (nxt if c[i] != 0 else rest).append(c)
            active = nxt
        a = active[0]
        if a[i] < 0:
            a = [-x for x in a]
        piv[i] = a
        work = rest
    H = [[piv[j][r] for j in range(3)] for r in range(3)]
    for j in range(3):
        for i in range(j - 1, -1, -1):
            q = H[i][j] // H[i][i]
            for r in range(3):
                H[r][j] -= q * H[r][i]
    return H


def minors(A, size):
    for rows in itertools.combinations(range(3), size):
        for cols in itertools.combinations(range(3), size):
            yield det([[A[r][c] for c in cols] for r in rows])


def det(m):
    if len(m) == 1:
        return m[0][0]
    if len(m) == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    return sum((-1) ** j * m[0][j] * det([row[:j] + row[j + 1:] for row in m[1:]]) for j in range(3))


def vp(x, p):
    if x == 0:
        return None
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def elementary_divisor_valuations(A, p):
    """Smith invariants via determinantal divisors; None if singular."""
    prev = 0
    out = []
    for size in (1, 2, 3):
        vals = [vp(m, p) for m in minors(A, size)]
        vals = [v for v in vals if v is not None]
        if not vals:
            return None
        d = min(vals)
        out.append(d - prev)
        prev = d
    return tuple(out)


def bracket(T, u, v):
    """T[i][j][k] nested structure constants."""
    return [sum(T[i][j][k] * u[i] * v[j] for i in range(3) for j in range(3)) for k in range(3)]


def diag_tensor(a0, a1, a2):
    T = [[[0] * 3 for _ in range(3)] for _ in range(3)]
    T[1][2][0], T[2][1][0] = a0, -a0
    T[2][0][1], T[0][2][1] = a1, -a1
    T[0][1][2], T[1][0][2] = a2, -a2
    return T


def in_upper_lattice(H, v):
    """Membership in the Z-span of an integer upper-triangular basis."""
    v = list(v)
    for i in (2, 1, 0):
        if v[i] % H[i][i]:
            return False
        c = v[i] // H[i][i]
        for r in range(3):
            v[r] -= c * H[r][i]
    return all(x == 0 for x in v)


def subalgebras_bruteforce(T, p, k):
    """Closed index-p^k sublattices, parametrised redundantly then deduplicated by HNF."""
    P = p**k
    seen = set()
    for k0 in range(k + 1):
        for k1 in range(k - k0 + 1):
            k2 = k - k0 - k1
            for e, f, g in itertools.product(range(P), repeat=3):
                cols = [(p**k0, 0, 0), (e, p**k1, 0), (f, g, p**k2)]
                H = int_hnf(cols, p, k)
                key = tuple(map(tuple, H))
                if key in seen:
                    continue
                if H[0][0] * H[1][1] * H[2][2] != P:
                    continue
                basis = [[H[r][j] for r in range(3)] for j in range(3)]
                if all(in_upper_lattice(H, bracket(T, basis[a], basis[b]))
                       for a, b in ((0, 1), (0, 2), (1, 2))):
                    seen.add(key)
    return seen


def module_set(cols, mod):
    """All elements of span(cols) in (Z/mod)^3, for tiny moduli."""
    out = set()
    for c in itertools.product(range(mod), repeat=len(cols)):
        out.add(tuple(sum(ci * col[r] for ci, col in zip(c, cols)) % mod for r in range(3)))
    return out


def ideal_by_brackets(T, H):
    basis = [[H[r][j] for r in range(3)] for j in range(3)]
    e = [[int(i == j) for j in range(3)] for i in range(3)]
    return all(in_upper_lattice(H, bracket(T, e[i], b)) for i in range(3) for b in basis)


__all__ = ["gcd", "xgcd", "int_hnf", "elementary_divisor_valuations", "bracket", "diag_tensor",
           "in_upper_lattice", "subalgebras_bruteforce", "module_set", "ideal_by_brackets", "vp", "det"]
