"""Linear algebra over Z_p at finite precision: Hermite and Smith forms, kernels.

Matrices hold residues modulo p^N with one precision per matrix. A submodule of
the ambient lattice is always read as ``span + p^N L``; with that convention every
normal form below is exact on residues, and a diagonal exponent equal to ``N``
means "nothing visible at this precision" in that direction.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import NotInvertible, PrecisionExhausted, RankDeficientAtPrecision
from .padic import PAdicScalar, check_prime, div_exact, valuation_mod, NotDivisible


@dataclass(frozen=True, slots=True)
class Matrix:
    prime: int
    precision: int
    data: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        check_prime(self.prime)
        if not self.data or not self.data[0]:
            raise ValueError("matrix must have at least one row and column")
        mod = self.prime**self.precision
        width = len(self.data[0])
        rows = []
        for row in self.data:
            if len(row) != width:
                raise ValueError("ragged matrix")
            rows.append(tuple(int(x) % mod for x in row))
        object.__setattr__(self, "data", tuple(rows))

    @classmethod
    def from_rows(cls, rows, prime: int, precision: int) -> Matrix:
        return cls(prime, precision, tuple(tuple(_as_int(x) for x in r) for r in rows))

    @classmethod
    def from_columns(cls, cols, prime: int, precision: int) -> Matrix:
        cols = [tuple(_as_int(x) for x in c) for c in cols]
        return cls(prime, precision, tuple(zip(*cols)))

    @classmethod
    def from_scalars(cls, grid: Sequence[Sequence[PAdicScalar]]) -> Matrix:
        """Precision of the result is the smallest entry precision."""
        p = grid[0][0].prime
        n = min(x.abs_precision for row in grid for x in row)
        return cls(p, n, tuple(tuple(x.residue for x in row) for row in grid))

    @classmethod
    def identity(cls, prime: int, precision: int, n: int = 3) -> Matrix:
        return cls(prime, precision, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def diag(cls, values, prime: int, precision: int) -> Matrix:
        values = [_as_int(v) for v in values]
        n = len(values)
        return cls(prime, precision,
                   tuple(tuple(values[i] if i == j else 0 for j in range(n)) for i in range(n)))

    @property
    def rows(self) -> int:
        return len(self.data)

    @property
    def cols(self) -> int:
        return len(self.data[0])

    @property
    def modulus(self) -> int:
        return self.prime**self.precision

    def entry(self, i: int, j: int) -> PAdicScalar:
        return PAdicScalar(self.prime, self.precision, self.data[i][j])

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.data)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> Matrix:
        return Matrix(self.prime, self.precision, tuple(zip(*self.data)))

    def with_precision(self, precision: int) -> Matrix:
        if precision > self.precision:
            raise PrecisionExhausted("cannot raise precision")
        return Matrix(self.prime, precision, self.data)

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        n = min(self.precision, other.precision)
        mod = self.prime**n
        oc = other.columns()
        return Matrix(self.prime, n, tuple(
            tuple(sum(a * b for a, b in zip(row, c)) % mod for c in oc) for row in self.data))

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        mod = self.modulus
        return tuple(sum(a * _as_int(b) for a, b in zip(row, v)) % mod for row in self.data)

    def det(self) -> PAdicScalar:
        if self.rows != 3 or self.cols != 3:
            raise ValueError("det implemented for 3x3 only")
        return PAdicScalar(self.prime, self.precision, _det3(self.data) % self.modulus)

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.data for x in row)

    def __repr__(self):
        return f"Matrix(p={self.prime}, N={self.precision}, {list(map(list, self.data))})"


def _as_int(x) -> int:
    return x.residue if isinstance(x, PAdicScalar) else int(x)


def _det3(m) -> int:
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def _val(x: int, p: int, n: int) -> int:
    v = valuation_mod(x, p, n)
    return n if v is None else v


def hermite_data(cols: Sequence[Sequence[int]], p: int, n: int) -> tuple[tuple[int, int, int], tuple[tuple[int, ...], ...]]:
    """Hermite form of ``span(cols) + p^n L`` in the 3-dim ambient lattice.

    Returns the diagonal exponents ``(k0, k1, k2)`` (each <= n) and the upper
    triangular residue matrix, rows-major, with ``H[i][i] = p^k_i mod p^n`` and
    off-diagonal ``H[i][j]`` reduced into ``[0, p^k_i)``.
    """
    mod = p**n
    work = [[int(x) % mod for x in c] for c in cols]
    pivots: list[list[int] | None] = [None, None, None]
    ks = [n, n, n]
    for i in (2, 1, 0):
        best, best_v = None, n
        for idx, c in enumerate(work):
            v = _val(c[i], p, n)
            if v < best_v:
                best, best_v = idx, v
        if best is None:
            continue
        piv = work.pop(best)
        pv = p**best_v
        inv = pow(piv[i] // pv, -1, mod)
        piv = [x * inv % mod for x in piv]
        for c in work:
            if c[i]:
                q = c[i] // pv
                for r in range(3):
                    c[r] = (c[r] - q * piv[r]) % mod
        if best_v:
            # p^(n-v) * pivot lies in the module and vanishes in row i, not above it
            s = p ** (n - best_v)
            extra = [x * s % mod for x in piv]
            if any(extra):
                work.append(extra)
        pivots[i] = piv
        ks[i] = best_v
    H = [[0] * 3 for _ in range(3)]
    for j in range(3):
        if pivots[j] is not None:
            for r in range(3):
                H[r][j] = pivots[j][r]
    for j in range(3):
        for i in range(j - 1, -1, -1):
            if ks[i] >= n:
                continue
            q = H[i][j] // p ** ks[i]
            if q:
                for r in range(3):
                    H[r][j] = (H[r][j] - q * H[r][i]) % mod
    return (ks[0], ks[1], ks[2]), tuple(tuple(r) for r in H)


def hermite_form(gens: Matrix) -> Matrix:
    """Canonical upper-triangular generator matrix of the column span of ``gens``."""
    if gens.rows != 3:
        raise ValueError("generators must have 3 rows")
    ks, H = hermite_data(gens.columns(), gens.prime, gens.precision)
    if max(ks) >= gens.precision:
        raise RankDeficientAtPrecision(f"span has rank < 3 modulo p^{gens.precision} (k={ks})")
    return Matrix(gens.prime, gens.precision, H)


def smith_decomposition(A: Matrix):
    """``(U, d, V)`` with ``U A V = diag(p^d_i)`` mod p^N, U and V unimodular.

    Pivot: an entry of minimal valuation, ties broken by lowest (row, column).
    ``d_i = N`` marks a vanishing elementary divisor.
    """
    if A.rows != 3 or A.cols != 3:
        raise ValueError("smith_decomposition is implemented for 3x3 matrices")
    p, n = A.prime, A.precision
    mod = p**n
    M = [list(r) for r in A.data]
    U = [[int(i == j) for j in range(3)] for i in range(3)]
    V = [[int(i == j) for j in range(3)] for i in range(3)]
    d = []
    for t in range(3):
        best, best_v = None, n
        for i in range(t, 3):
            for j in range(t, 3):
                v = _val(M[i][j], p, n)
                if v < best_v:
                    best, best_v = (i, j), v
        if best is None:
            d.extend([n] * (3 - t))
            break
        bi, bj = best
        M[t], M[bi] = M[bi], M[t]
        U[t], U[bi] = U[bi], U[t]
        for row in M:
            row[t], row[bj] = row[bj], row[t]
        for row in V:
            row[t], row[bj] = row[bj], row[t]
        pv = p**best_v
        inv = pow(M[t][t] // pv, -1, mod)
        M[t] = [x * inv % mod for x in M[t]]
        U[t] = [x * inv % mod for x in U[t]]
        for i in range(t + 1, 3):
            if M[i][t]:
                q = M[i][t] // pv
                M[i] = [(a - q * b) % mod for a, b in zip(M[i], M[t])]
                U[i] = [(a - q * b) % mod for a, b in zip(U[i], U[t])]
        for j in range(t + 1, 3):
            if M[t][j]:
                q = M[t][j] // pv
                for row in M:
                    row[j] = (row[j] - q * row[t]) % mod
                for row in V:
                    row[j] = (row[j] - q * row[t]) % mod
        d.append(best_v)
    return Matrix(p, n, tuple(map(tuple, U))), tuple(d), Matrix(p, n, tuple(map(tuple, V)))


def smith_invariants(A: Matrix) -> tuple[int, int, int]:
    """Valuations of the elementary divisors, ascending."""
    _, d, _ = smith_decomposition(A)
    if max(d) >= A.precision:
        raise RankDeficientAtPrecision(f"matrix has rank < 3 modulo p^{A.precision}")
    return d


def is_gl3(A: Matrix) -> bool:
    if A.rows != 3 or A.cols != 3:
        raise ValueError("is_gl3 needs a 3x3 matrix")
    return A.det().is_unit()


def inverse_gl3(A: Matrix) -> Matrix:
    if not is_gl3(A):
        raise NotInvertible("determinant is not a unit")
    m = A.data
    mod = A.modulus
    dinv = pow(_det3(m) % mod, -1, mod)
    adj = [[0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            rs = [r for r in range(3) if r != j]
            cs = [c for c in range(3) if c != i]
            minor = m[rs[0]][cs[0]] * m[rs[1]][cs[1]] - m[rs[0]][cs[1]] * m[rs[1]][cs[0]]
            adj[i][j] = (-1) ** (i + j) * minor * dinv % mod
    return Matrix(A.prime, A.precision, tuple(map(tuple, adj)))


def solve_in_span(H: Matrix, v: Sequence) -> tuple[PAdicScalar, ...] | None:
    """Coordinates ``c`` with ``H c = v`` for a Hermite matrix ``H``; ``None`` if ``v`` is not in the span.

    Back-substitution divides by the diagonal p-powers, so coordinate ``i`` comes
    back at precision ``N - (k_i + ... + k_2)``.
    """
    p, n = H.prime, H.precision
    ks = []
    for i in range(3):
        k = _val(H.data[i][i], p, n)
        if k >= n:
            raise PrecisionExhausted("Hermite diagonal vanishes at precision")
        ks.append(k)
    vs = [x if isinstance(x, PAdicScalar) else PAdicScalar(p, n, int(x) % p**n) for x in v]
    c: list[PAdicScalar | None] = [None, None, None]
    try:
        for i in (2, 1, 0):
            acc = vs[i]
            for j in range(i + 1, 3):
                if H.data[i][j]:
                    acc = acc - c[j] * H.data[i][j]
            c[i] = div_exact(acc, PAdicScalar(p, n, H.data[i][i]))
    except NotDivisible:
        return None
    return tuple(c)


def kernel_mod(C: Matrix) -> list[tuple[int, ...]]:
    """Generators of ``{x : C x = 0 mod p^N}`` (together with p^N L)."""
    _, e, V = smith_decomposition(C)
    p, n = C.prime, C.precision
    mod = p**n
    gens = []
    for j in range(3):
        s = p ** (n - e[j]) % mod
        gens.append(tuple(V.data[i][j] * s % mod for i in range(3)))
    return gens


def preimage_data(A: Matrix, H: Matrix) -> tuple[tuple[int, int, int], tuple[tuple[int, ...], ...]]:
    """Hermite data of ``{x : A x in span(H) + p^N L}``; never raises on rank defect."""
    if A.prime != H.prime:
        raise ValueError("mixed primes")
    n = min(A.precision, H.precision)
    A = A.with_precision(n)
    H = H.with_precision(n)
    p = A.prime
    mod = p**n
    U, d, _ = smith_decomposition(H)
    B = U @ A
    C = Matrix(p, n, tuple(tuple(x * p ** (n - d[i]) % mod for x in B.data[i]) for i in range(3)))
    return hermite_data(kernel_mod(C), p, n)


def preimage_of_submodule(A: Matrix, H: Matrix) -> Matrix:
    ks, Hd = preimage_data(A, H)
    n = min(A.precision, H.precision)
    if max(ks) >= n:
        raise PrecisionExhausted(f"preimage is rank-deficient modulo p^{n}")
    return Matrix(A.prime, n, Hd)
