"""Full-rank sublattices, subalgebra enumeration, and the invariant ideal of the lower bound."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import _kernels
from .errors import HypothesisViolated, NotClosed, PrecisionExhausted
from .lattice import LieLattice, SInvariants, diagonal_constants, k_bound, s_invariants
from .linalg import (Matrix, hermite_data, inverse_gl3, is_gl3, preimage_data,
                     solve_in_span, smith_decomposition)
from .padic import BottomAtPrecision, PAdicScalar, div_exact

RESIDUAL_FLOOR = 8


@dataclass(frozen=True)
class Submodule:
    """``span(hermite columns) + p^N L`` with ``hermite`` in canonical form.

    ``k_vector[i] == N`` means the module is invisible at precision in direction i;
    ``(N, N, N)`` is the zero module.
    """

    prime: int
    precision: int
    k_vector: tuple[int, int, int]
    hermite: Matrix = field(repr=False)
    params: tuple[int, int, int] | None = field(default=None, compare=False)

    @classmethod
    def span(cls, gens: Iterable[Sequence[int]], prime: int, precision: int) -> Submodule:
        gens = [tuple(int(x) for x in g) for g in gens]
        ks, H = hermite_data(gens, prime, precision)
        return cls(prime, precision, ks, Matrix(prime, precision, H))

    @classmethod
    def from_params(cls, k_vector, e: int, f: int, g: int, prime: int, precision: int) -> Submodule:
        """The Hermite shape ``[[p^k0, e, f], [0, p^k1, g], [0, 0, p^k2]]`` (already reduced)."""
        k0, k1, k2 = k_vector
        H = ((prime**k0, e, f), (0, prime**k1, g), (0, 0, prime**k2))
        return cls(prime, precision, tuple(k_vector), Matrix(prime, precision, H), (e, f, g))

    @classmethod
    def ambient(cls, prime: int, precision: int) -> Submodule:
        return cls(prime, precision, (0, 0, 0), Matrix.identity(prime, precision), (0, 0, 0))

    @classmethod
    def monomial(cls, m: Sequence[int], prime: int, precision: int) -> Submodule:
        """``<p^m0 x0, p^m1 x1, p^m2 x2>``."""
        ks = tuple(min(int(x), precision) for x in m)
        return cls(prime, precision, ks, Matrix.diag([prime**x for x in ks], prime, precision))

    @classmethod
    def zero(cls, prime: int, precision: int) -> Submodule:
        return cls.monomial((precision,) * 3, prime, precision)

    @property
    def index_exponent(self) -> int:
        return sum(self.k_vector)

    @property
    def is_zero(self) -> bool:
        return min(self.k_vector) >= self.precision

    @property
    def is_full_rank(self) -> bool:
        return max(self.k_vector) < self.precision

    @property
    def residual(self) -> int:
        """Digits of precision left above the largest Hermite exponent."""
        return self.precision - max(self.k_vector)

    @property
    def is_monomial(self) -> bool:
        H = self.hermite.data
        return H[0][1] == H[0][2] == H[1][2] == 0

    def basis(self) -> list[tuple[int, ...]]:
        return self.hermite.columns()

    def hermite_params(self) -> tuple[int, int, int]:
        H = self.hermite.data
        return H[0][1], H[0][2], H[1][2]

    def at_precision(self, n: int) -> Submodule:
        if n > self.precision:
            raise PrecisionExhausted("cannot raise precision of a submodule")
        if n == self.precision:
            return self
        return Submodule.span(self.basis(), self.prime, n)

    def contains(self, v: Sequence[int]) -> bool:
        p = self.prime
        if self.is_full_rank:
            return solve_in_span(self.hermite, v) is not None
        U, d, _ = smith_decomposition(self.hermite)
        w = U.apply(v)
        return all(w[i] % p ** d[i] == 0 for i in range(3))

    def issubset(self, other: Submodule) -> bool:
        n = min(self.precision, other.precision)
        a, b = self.at_precision(n), other.at_precision(n)
        return all(b.contains(v) for v in a.basis())

    def same_module(self, other: Submodule) -> bool:
        n = min(self.precision, other.precision)
        a, b = self.at_precision(n), other.at_precision(n)
        return a.k_vector == b.k_vector and a.hermite == b.hermite

    def __add__(self, other: Submodule) -> Submodule:
        n = min(self.precision, other.precision)
        return Submodule.span(self.basis() + other.basis(), self.prime, n)

    def scaled(self, r: int) -> Submodule:
        """``p^r S``."""
        c = self.prime**r
        return Submodule.span([[c * x for x in v] for v in self.basis()], self.prime, self.precision)

    def intersect(self, other: Submodule) -> Submodule:
        n = min(self.precision, other.precision)
        a, b = self.at_precision(n), other.at_precision(n)
        ks, P = preimage_data(a.hermite, b.hermite)
        gens = a.hermite @ Matrix(self.prime, n, P)
        return Submodule.span(gens.columns(), self.prime, n)

    def preimage(self, A: Matrix) -> Submodule:
        """``{x : A x in self}``."""
        n = min(self.precision, A.precision)
        ks, H = preimage_data(A, self.at_precision(n).hermite)
        return Submodule(self.prime, n, ks, Matrix(self.prime, n, H))


def _lattice_at(L: LieLattice, n: int) -> LieLattice:
    return L if n == L.precision else L.with_precision(n)


def is_closed(L: LieLattice, S: Submodule) -> bool:
    L = _lattice_at(L, S.precision)
    b = S.basis()
    return all(S.contains(L.bracket(b[i], b[j])) for i, j in ((0, 1), (0, 2), (1, 2)))


def enumerate_subalgebras(L: LieLattice, k: int, backend: str | None = None) -> list[Submodule]:
    """All subalgebras of index p^k, lexicographic in (k0, k1, k2, e, f, g).

    Representatives: ``e, f`` mod p^k0 and ``g`` mod p^k1 (reduction by the pivot
    of the entry's row).
    """
    if diagonal_constants(L) is None:
        raise ValueError("enumeration expects a lattice in diagonal form")
    if k >= L.precision:
        raise PrecisionExhausted("index exceeds working precision")
    p = L.prime
    cands = _kernels.enumerate_candidates(p, k)
    mask = _kernels.closure_mask(cands, L.tensor, p, k, backend=backend)
    out = []
    for row in cands[mask]:
        k0, k1, k2, e, f, g = (int(x) for x in row)
        out.append(Submodule.from_params((k0, k1, k2), e, f, g, p, L.precision))
    return out


def coordinates(M: Submodule, v: Sequence[int]) -> tuple[PAdicScalar, ...]:
    c = solve_in_span(M.hermite, v)
    if c is None:
        raise NotClosed(f"{v} is not in the submodule")
    return c


def induced_structure(L: LieLattice, M: Submodule) -> tuple[LieLattice, SInvariants]:
    """Structure constants of M in its Hermite basis, and M's s-invariants.

    Coordinates lose ``index_exponent`` digits, so the result lives at precision
    ``N - index_exponent``.
    """
    if not M.is_full_rank:
        raise PrecisionExhausted("submodule is rank-deficient at precision")
    L = _lattice_at(L, M.precision)
    b = M.basis()
    n = M.precision - M.index_exponent
    if n < 1:
        raise PrecisionExhausted("no digits left for induced constants")
    entries = []
    for i, j in ((0, 1), (0, 2), (1, 2)):
        c = coordinates(M, L.bracket(b[i], b[j]))
        entries.extend((i, j, l, c[l].residue % L.prime**n) for l in range(3))
    ML = LieLattice.from_entries(entries, L.prime, n)
    return ML, s_invariants(ML, method="smith")


def derived_and_gamma2(L: LieLattice, M: Submodule) -> tuple[Submodule, Submodule]:
    """``[M, M]`` and ``gamma_2(M) = [M, [M, M]]``, as submodules of L."""
    if not is_closed(L, M):
        raise NotClosed("submodule is not a subalgebra")
    L = _lattice_at(L, M.precision)
    b = M.basis()
    D = Submodule.span([L.bracket(b[i], b[j]) for i, j in ((0, 1), (0, 2), (1, 2))],
                       L.prime, M.precision)
    if D.is_zero:
        return D, D
    d = D.basis()
    G = Submodule.span([L.bracket(x, y) for x in b for y in d], L.prime, M.precision)
    return D, G


def ideal_criterion_checks(m: Sequence[int], s: Sequence[int]) -> list[tuple[str, bool]]:
    """The nine inequalities ``m_i + s_j >= m_j`` for a monomial submodule."""
    return [(f"m{i}+s{j}>=m{j}", m[i] + s[j] >= m[j]) for i in range(3) for j in range(3)]


def _is_ideal_bracket(L: LieLattice, S: Submodule) -> bool:
    L = _lattice_at(L, S.precision)
    return all(S.contains(L.bracket(L.basis(i), v)) for i in range(3) for v in S.basis())


def _is_ideal_criterion(L: LieLattice, S: Submodule) -> bool | None:
    consts = diagonal_constants(L)
    if consts is None or not S.is_monomial or not S.is_full_rank:
        return None
    s = []
    for a in consts:
        v = a.valuation()
        s.append(L.precision if isinstance(v, BottomAtPrecision) else v)
    return all(ok for _, ok in ideal_criterion_checks(S.k_vector, s))


def is_ideal(L: LieLattice, S: Submodule, method: str = "auto") -> bool:
    """Ideal test. ``"bracket"``: membership of [x_i, s]; ``"criterion"``: the
    exponent inequalities (diagonal lattice, monomial S); ``"auto"`` runs both when
    the criterion applies and insists they agree."""
    if method == "bracket":
        return _is_ideal_bracket(L, S)
    crit = _is_ideal_criterion(L, S)
    if method == "criterion":
        if crit is None:
            raise ValueError("criterion needs a diagonal lattice and a monomial submodule")
        return crit
    direct = _is_ideal_bracket(L, S)
    if crit is not None and crit != direct:
        raise AssertionError(f"ideal tests disagree on {S}: criterion={crit}, bracket={direct}")
    return direct


def largest_ideal_in(L: LieLattice, S: Submodule) -> Submodule:
    """Greatest ideal of L contained in S (descending fixed point)."""
    L = _lattice_at(L, S.precision)
    ads = [L.ad(i) for i in range(3)]
    T = S
    for _ in range(3 * S.precision + 1):
        nxt = T
        for A in ads:
            nxt = nxt.intersect(T.preimage(A))
        if nxt == T:
            return T
        T = nxt
    raise PrecisionExhausted("largest-ideal iteration did not stabilise")


def hereditary_witness(L: LieLattice, M: Submodule, y: Sequence[int]):
    """Brackets ``z1 = [[y, p^k x1], p^k x0]``, ``z2 = [[y, p^k x2], p^k x0]``, ``z0 = [z1, z2]``.

    ``k`` is M's index exponent (so ``p^k L`` lies in M). Returns ``(z0, z1, z2)``.
    """
    p = L.prime
    k = M.index_exponent
    pk = p**k
    e = [tuple(pk * int(i == j) for j in range(3)) for i in range(3)]
    z1 = L.bracket(L.bracket(y, e[1]), e[0])
    z2 = L.bracket(L.bracket(y, e[2]), e[0])
    z0 = L.bracket(z1, z2)
    return z0, z1, z2


# ---------------------------------------------------------------------------
# Replay of the invariant-ideal construction for one subalgebra.


@dataclass(frozen=True)
class ProofScalars:
    h: PAdicScalar
    a3: PAdicScalar
    a4: PAdicScalar
    r0: int
    r1: int
    m0: int
    m1: int
    m2: int
    t0: int
    t1: int
    t2: int

    @property
    def m(self) -> tuple[int, int, int]:
        return (self.m0, self.m1, self.m2)

    @property
    def t(self) -> tuple[int, int, int]:
        return (self.t0, self.t1, self.t2)


def proof_scalars(consts, s: Sequence[int], k_vector: Sequence[int], e: int, f: int, g: int) -> ProofScalars:
    a0, a1, a2 = consts
    p = a0.prime
    k0, k1, k2 = k_vector
    k = k0 + k1 + k2
    s0, s1, s2 = s
    h = PAdicScalar.of(e * g - f * p**k1, p, a0.abs_precision)
    a3 = a0 * p ** (2 * k1 + 2 * k2) + a1 * (e * e * p ** (2 * k2)) + a2 * h * h
    a4 = a0 * a1 * p ** (2 * k2) + a0 * a2 * (g * g) + a1 * a2 * (f * f)
    r0 = s0 + s1 + k1 + 2 * k2
    r1 = s0 + k1 + k2
    return ProofScalars(
        h=h, a3=a3, a4=a4, r0=r0, r1=r1,
        m0=r1 + s0 + k1 + k2, m1=s0 + s1 + k1 + 2 * k2, m2=r0 + k2,
        t0=s0 + k - 2 * k0, t1=s1 + k - 2 * k1, t2=s2 + k - 2 * k2,
    )


class _Checks:
    def __init__(self):
        self.items: list[tuple[str, bool]] = []

    def add(self, name: str, ok: bool) -> bool:
        self.items.append((name, bool(ok)))
        return bool(ok)

    def first_failure(self) -> str | None:
        for name, ok in self.items:
            if not ok:
                return name
        return None


def _pw(p: int, n: int, e: int) -> PAdicScalar:
    return PAdicScalar.from_unit_valuation(1, e, p, n)


def _vec_eq(u, v, p: int, n: int) -> bool:
    mod = p**n
    return all((int(a) - int(b)) % mod == 0 for a, b in zip(u, v))


def _scalar_col(M: Matrix, j: int) -> list[PAdicScalar]:
    return [M.entry(i, j) for i in range(3)]


def replay_subalgebra(L: LieLattice, M: Submodule, floor: int = RESIDUAL_FLOOR):
    """Run every step of the invariant-ideal construction on one subalgebra.

    ``L`` must be in well-ordered diagonal form. Returns ``(I, scalars, checks)``;
    ``I`` is ``None`` when an early check already failed. Nothing is raised for
    failed checks: they are recorded by name.
    """
    ck = _Checks()
    p, N = L.prime, L.precision
    consts = diagonal_constants(L)
    if consts is None:
        raise ValueError("lattice is not in diagonal form")
    a0, a1, a2 = consts
    s = s_invariants(L, method="diagonal")
    sv = tuple(a.valuation() for a in consts)
    ck.add("constants well ordered", tuple(sv) == tuple(s))
    K = k_bound(s)
    k0, k1, k2 = M.k_vector
    k = k0 + k1 + k2
    ck.add("k < K", k < K)
    e, f, g = M.hermite_params()
    sc = proof_scalars(consts, s, M.k_vector, e, f, g)
    s0, s1, s2 = s
    ck.add("M closed under bracket", is_closed(L, M))
    ck.add("v(a3) = s0+2k1+2k2", sc.a3.valuation() == s0 + 2 * k1 + 2 * k2)
    ck.add("v(a4) = s0+s1+2k2", sc.a4.valuation() == s0 + s1 + 2 * k2)
    if ck.first_failure():
        return None, sc, ck.items

    # Change of basis y -> z inside M.
    pk = lambda x: _pw(p, N, x)  # noqa: E731
    try:
        V10 = -div_exact((a1 * e * pk(2 * k2) + a2 * g * sc.h) * pk(k0), sc.a3)
        V20 = div_exact(a2 * sc.h * pk(k0 + k1), sc.a3)
        V21 = -div_exact(a2 * (a0 * g * pk(k1) + a1 * e * f), sc.a4)
        v_ok = True
    except ArithmeticError:
        v_ok = False
    ck.add("V has entries in Z_p", v_ok)
    if not v_ok:
        return None, sc, ck.items
    one, zero = pk(0), pk(N)
    V = Matrix.from_scalars([[one, zero, zero], [V10, one, zero], [V20, V21, one]])
    ck.add("V in GL3(Z_p)", is_gl3(V))
    Z = M.hermite @ V
    nz = Z.precision
    c0 = div_exact(sc.a3, pk(k))
    c1 = div_exact(sc.a4 * pk(k), sc.a3)
    c2 = div_exact(a0 * a1 * a2 * pk(k), sc.a4)
    cs = (c0, c1, c2)
    Lz = _lattice_at(L, nz)
    zc = Z.columns()
    z_ok = True
    for i in range(3):
        lhs = Lz.bracket(zc[i], zc[(i + 1) % 3])
        c = cs[(i + 2) % 3]
        n = min(nz, c.abs_precision)
        rhs = [c.residue * x for x in zc[(i + 2) % 3]]
        z_ok &= _vec_eq(lhs, rhs, p, n)
    ck.add("[z_i,z_(i+1)] = c_(i+2) z_(i+2)", z_ok)
    ck.add("v(c_i) = t_i", tuple(c.valuation() for c in cs) == sc.t)

    _, t_snf = induced_structure(L, M)
    ck.add("t = s + k - 2k_i (Smith form of induced constants)", tuple(t_snf) == sc.t)
    ck.add("0 <= t0 < t1 < t2", 0 <= sc.t0 < sc.t1 < sc.t2)

    # w: unit-rescaled z, a well diagonalizing basis of M.
    u3, u4 = sc.a3.unit_part(), sc.a4.unit_part()
    D = Matrix.from_scalars([[u3, zero, zero], [zero, u4, zero], [zero, zero, one]])
    W = Z @ D
    nw = W.precision
    VD = (V @ D).with_precision(nw)
    VDinv = inverse_gl3(VD)
    wc = W.columns()
    Lw = _lattice_at(L, nw)
    Mw = M.at_precision(nw)
    w_entries = []
    for i, j in ((0, 1), (0, 2), (1, 2)):
        cy = coordinates(Mw, Lw.bracket(wc[i], wc[j]))
        cw = VDinv.apply([x.residue for x in cy])
        w_entries.extend((i, j, l, cw[l]) for l in range(3))
    nwc = nw - M.index_exponent
    Mw_lat = LieLattice.from_entries(w_entries, p, nwc)
    wd = diagonal_constants(Mw_lat)
    ck.add("w is a diagonalizing basis of M",
           wd is not None and tuple(x.valuation() for x in wd) == sc.t)

    r0, r1, t0, t1, t2 = sc.r0, sc.r1, sc.t0, sc.t1, sc.t2
    DM, G2 = derived_and_gamma2(L, M)

    def wspan(exps):
        return Submodule.span([[p**ex * x for x in wc[i]] for i, ex in enumerate(exps)], p, nw)

    ck.add("[M,M] = <p^t0 w0, p^t1 w1, p^t2 w2>", DM.same_module(wspan((t0, t1, t2))))
    ck.add("gamma2(M) = <p^(t0+t1) w0, p^(t0+t1) w1, p^(t0+t2) w2>",
           G2.same_module(wspan((t0 + t1, t0 + t1, t0 + t2))))
    ck.add("r0 = t0+t1+k1", r0 == t0 + t1 + k1)
    ck.add("r1 = t0+k0", r1 == t0 + k0)
    ck.add("r1+t0 <= r0", r1 + t0 <= r0)
    ck.add("r1+t0 <= t0+t1", r1 + t0 <= t0 + t1)
    ck.add("t0+t1 <= r0", t0 + t1 <= r0)
    ck.add("t0+t1 <= r1+t1", t0 + t1 <= r1 + t1)
    ck.add("r0 <= r1+t2", r0 <= r1 + t2)
    ck.add("r0 <= t0+t2", r0 <= t0 + t2)

    I = M.scaled(r0) + DM.scaled(r1) + G2
    I_w = wspan((r1 + t0, t0 + t1, r0))
    ck.add("I = <p^(r1+t0) w0, p^(t0+t1) w1, p^r0 w2>", I.same_module(I_w))

    # The displayed matrix of generator coordinates, against the w-columns.
    h = sc.h
    Wt = [
        [a0 * pk(r1 + k1 + k2), a0 * (a1 * e * pk(2 * k2) + a2 * g * h), pk(r0) * f],
        [-(a1 * e * pk(r1 + k2)), a1 * (a0 * pk(k1 + 2 * k2) - a2 * f * h), pk(r0) * g],
        [a2 * h * pk(r1), -(a2 * (a0 * g * pk(k1) + a1 * e * f) * pk(k2)), pk(r0 + k2)],
    ]
    Wt = Matrix.from_scalars(Wt)
    gen_cols = [[p ** (r1 + t0) * x for x in wc[0]], [p ** (t0 + t1) * x for x in wc[1]],
                [p**r0 * x for x in wc[2]]]
    nt = min(nw, Wt.precision)
    ck.add("generator coordinates match the displayed matrix",
           all(_vec_eq(gen_cols[j], Wt.column(j), p, nt) for j in range(3)))
    Wt_mod = Submodule.span(Wt.columns(), p, Wt.precision)
    mono = Submodule.monomial(sc.m, p, N)
    ck.add("hermite(W~) = diag(p^m0, p^m1, p^m2)", Wt_mod.same_module(mono))
    ck.add("I = <p^m0 x0, p^m1 x1, p^m2 x2>", I.same_module(mono))
    for name, ok in ideal_criterion_checks(sc.m, s):
        ck.add(name, ok)
    ck.add("I is an ideal (bracket membership)", _is_ideal_bracket(L, mono))
    ck.add("I is nonzero", mono.is_full_rank)
    ck.add("I inside M", mono.issubset(M))
    exps = (r1 + t0, t0 + t1, r0, t0 + t2, t2, sc.m2)
    ck.add(f"residual precision >= {floor}", min(nwc, Wt.precision, nw) - max(exps) >= floor)
    return mono, sc, ck.items


def canonical_ideal(L: LieLattice, M: Submodule) -> tuple[Submodule, ProofScalars]:
    """The ideal ``p^r0 M + p^r1 [M,M] + gamma_2(M)`` with every proof step asserted."""
    I, sc, checks = replay_subalgebra(L, M)
    for name, ok in checks:
        if not ok:
            raise HypothesisViolated(name, where=f"M k={M.k_vector} efg={M.hermite_params()}")
    return I, sc
