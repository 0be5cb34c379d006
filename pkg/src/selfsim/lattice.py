"""Three-dimensional Lie lattices over Z_p given by structure constants."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .errors import NotInvertible, PrecisionTooSmall, RankDeficientAtPrecision, Unsolvable
from .linalg import Matrix, inverse_gl3, is_gl3, smith_invariants
from .padic import DEFAULT_PRECISION, BottomAtPrecision, PAdicScalar, check_prime

Vector = tuple[int, int, int]


class SInvariants(NamedTuple):
    s0: int
    s1: int
    s2: int


def _idx(i: int, j: int, k: int) -> int:
    return 9 * i + 3 * j + k


@dataclass(frozen=True, slots=True)
class LieLattice:
    """Structure constants ``[x_i, x_j] = sum_k c[i][j][k] x_k`` as residues mod p^N.

    ``tensor`` is flat, entry ``9*i + 3*j + k``.
    """

    prime: int
    precision: int
    tensor: tuple[int, ...]

    def __post_init__(self):
        check_prime(self.prime)
        if self.precision < 1:
            raise ValueError("precision must be >= 1")
        if len(self.tensor) != 27:
            raise ValueError("tensor must have 27 entries")
        mod = self.prime**self.precision
        t = tuple(int(x) % mod for x in self.tensor)
        for i, j, k in itertools.product(range(3), repeat=3):
            if (t[_idx(i, j, k)] + t[_idx(j, i, k)]) % mod:
                raise ValueError(f"tensor is not antisymmetric at ({i},{j},{k})")
        object.__setattr__(self, "tensor", t)

    @classmethod
    def from_entries(cls, entries, prime: int, precision: int = DEFAULT_PRECISION) -> LieLattice:
        """Build from ``(i, j, k, c)`` entries; the antisymmetric partner is filled in."""
        mod = prime**precision
        t = [None] * 27
        for i, j, k, c in entries:
            c = int(c.residue if isinstance(c, PAdicScalar) else c) % mod
            for idx, val in ((_idx(i, j, k), c), (_idx(j, i, k), -c % mod)):
                if t[idx] is not None and t[idx] != val:
                    raise ValueError(f"conflicting or non-antisymmetric entry ({i},{j},{k})")
                t[idx] = val
        return cls(prime, precision, tuple(0 if x is None else x for x in t))

    @classmethod
    def from_diagonal(cls, a0, a1, a2, prime: int, precision: int = DEFAULT_PRECISION) -> LieLattice:
        """``[x1,x2] = a0 x0``, ``[x2,x0] = a1 x1``, ``[x0,x1] = a2 x2``."""
        return cls.from_entries([(1, 2, 0, a0), (2, 0, 1, a1), (0, 1, 2, a2)], prime, precision)

    @property
    def modulus(self) -> int:
        return self.prime**self.precision

    def c(self, i: int, j: int, k: int) -> int:
        return self.tensor[_idx(i, j, k)]

    def bracket(self, u: Sequence[int], v: Sequence[int]) -> Vector:
        mod = self.modulus
        t = self.tensor
        out = [0, 0, 0]
        for i in range(3):
            if not u[i]:
                continue
            for j in range(3):
                if i == j or not v[j]:
                    continue
                uv = u[i] * v[j]
                base = 9 * i + 3 * j
                for k in range(3):
                    if t[base + k]:
                        out[k] += uv * t[base + k]
        return (out[0] % mod, out[1] % mod, out[2] % mod)

    def basis(self, i: int) -> Vector:
        return tuple(int(i == j) for j in range(3))

    def ad(self, i: int) -> Matrix:
        """Matrix of ``y -> [x_i, y]``."""
        e = self.basis(i)
        return Matrix.from_columns([self.bracket(e, self.basis(j)) for j in range(3)],
                                   self.prime, self.precision)

    def derived_matrix(self) -> Matrix:
        """Columns ``[x1,x2], [x2,x0], [x0,x1]``; its column span is [L, L]."""
        b = self.basis
        return Matrix.from_columns([self.bracket(b(1), b(2)), self.bracket(b(2), b(0)),
                                    self.bracket(b(0), b(1))], self.prime, self.precision)

    def with_precision(self, precision: int) -> LieLattice:
        if precision > self.precision:
            raise PrecisionTooSmall("cannot raise precision of structure constants")
        return LieLattice(self.prime, precision, self.tensor)


def bracket(L: LieLattice, u, v) -> Vector:
    return L.bracket(u, v)


def jacobi_check(L: LieLattice) -> bool:
    b = L.basis
    for i, j, k in itertools.product(range(3), repeat=3):
        total = [0, 0, 0]
        for x, y, z in ((i, j, k), (j, k, i), (k, i, j)):
            w = L.bracket(b(x), L.bracket(b(y), b(z)))
            total = [s + t for s, t in zip(total, w)]
        if any(s % L.modulus for s in total):
            return False
    return True


def diagonal_constants(L: LieLattice) -> tuple[PAdicScalar, PAdicScalar, PAdicScalar] | None:
    """``(a0, a1, a2)`` if the tensor is in diagonal form, else ``None``."""
    allowed = {_idx(1, 2, 0), _idx(2, 1, 0), _idx(2, 0, 1), _idx(0, 2, 1), _idx(0, 1, 2), _idx(1, 0, 2)}
    if any(x for idx, x in enumerate(L.tensor) if idx not in allowed):
        return None
    p, n = L.prime, L.precision
    return (PAdicScalar(p, n, L.c(1, 2, 0)), PAdicScalar(p, n, L.c(2, 0, 1)),
            PAdicScalar(p, n, L.c(0, 1, 2)))


def is_diagonal(L: LieLattice) -> bool:
    return diagonal_constants(L) is not None


def change_basis(L: LieLattice, T: Matrix) -> LieLattice:
    """Structure constants in the basis ``z_j = sum_i T[i][j] x_i``."""
    if T.prime != L.prime:
        raise ValueError("mixed primes")
    if not is_gl3(T):
        raise NotInvertible("change of basis is not in GL_3(Z_p)")
    n = min(L.precision, T.precision)
    L = L.with_precision(n)
    T = T.with_precision(n)
    Tinv = inverse_gl3(T)
    cols = T.columns()
    entries = []
    for a in range(3):
        for b in range(a + 1, 3):
            w = Tinv.apply(L.bracket(cols[a], cols[b]))
            entries.extend((a, b, c, w[c]) for c in range(3))
    return LieLattice.from_entries(entries, L.prime, n)


# Signed permutations that keep the diagonal shape: cyclic shifts as-is, transpositions
# negate the remaining basis vector. ``perm[i]`` is the old index of new vector i.
_DIAGONAL_PERMS = (
    ((0, 1, 2), (1, 1, 1)),
    ((1, 2, 0), (1, 1, 1)),
    ((2, 0, 1), (1, 1, 1)),
    ((1, 0, 2), (1, 1, -1)),
    ((2, 1, 0), (1, -1, 1)),
    ((0, 2, 1), (-1, 1, 1)),
)


def signed_permutation_matrix(perm, signs, prime: int, precision: int) -> Matrix:
    rows = [[0] * 3 for _ in range(3)]
    for new, old in enumerate(perm):
        rows[old][new] = signs[new]
    return Matrix.from_rows(rows, prime, precision)


def _valuations(consts) -> tuple[int, int, int]:
    vs = tuple(a.valuation() for a in consts)
    if any(isinstance(v, BottomAtPrecision) for v in vs):
        raise Unsolvable(f"a diagonal constant vanishes modulo p^{consts[0].abs_precision}")
    return vs


def well_diagonalize(L: LieLattice) -> tuple[LieLattice, tuple[int, int, int]]:
    """Relabel a diagonal basis so the constant valuations are non-decreasing.

    Returns the new lattice and ``perm`` with new ``x_i = +-x_{perm[i]}``.
    """
    consts = diagonal_constants(L)
    if consts is None:
        raise ValueError("lattice is not in diagonal form")
    _valuations(consts)
    for perm, signs in _DIAGONAL_PERMS:
        T = signed_permutation_matrix(perm, signs, L.prime, L.precision)
        L2 = change_basis(L, T)
        vs = _valuations(diagonal_constants(L2))
        if vs[0] <= vs[1] <= vs[2]:
            return L2, perm
    raise AssertionError("no ordering permutation found")  # unreachable: S_3 is covered


def s_invariants(L: LieLattice, method: str = "auto") -> SInvariants:
    """Elementary-divisor exponents of L/[L, L].

    ``method`` is ``"diagonal"`` (sorted constant valuations), ``"smith"`` (Smith
    form of the derived matrix) or ``"auto"`` (diagonal when possible).
    """
    consts = diagonal_constants(L) if method in ("auto", "diagonal") else None
    if method == "diagonal" and consts is None:
        raise ValueError("lattice is not in diagonal form")
    if consts is not None:
        return SInvariants(*sorted(_valuations(consts)))
    try:
        return SInvariants(*smith_invariants(L.derived_matrix()))
    except RankDeficientAtPrecision as exc:
        raise Unsolvable(f"[L,L] has rank < 3 modulo p^{L.precision}") from exc


def k_bound(s: Sequence[int]) -> int:
    """ceil(min((s1 - s0)/2, (s2 - s1)/2))."""
    s0, s1, s2 = s
    return (min(s1 - s0, s2 - s1) + 1) // 2


def harness_precision(s: Sequence[int], k: int) -> int:
    return 2 * s[2] + 6 * k + 16


def example_family(l: int, p: int, precision: int | None = None) -> LieLattice:
    """``[x1,x2] = p^2 x0``, ``[x2,x0] = p^(2l+2) x1``, ``[x0,x1] = -p^(4l+2) x2``."""
    if l < 0:
        raise ValueError("l must be >= 0")
    check_prime(p)
    if precision is None:
        precision = harness_precision((2, 2 * l + 2, 4 * l + 2), 0)
    if precision <= 4 * l + 2:
        raise PrecisionTooSmall(f"precision {precision} cannot hold p^{4 * l + 2}")
    return LieLattice.from_diagonal(p**2, p ** (2 * l + 2), -p ** (4 * l + 2), p, precision)


def is_powerful(L: LieLattice) -> bool:
    """[L, L] inside p^eps L, eps = 1 for odd p and 2 for p = 2."""
    eps = 1 if L.prime != 2 else 2
    return all(x % L.prime**eps == 0 for x in L.tensor)
