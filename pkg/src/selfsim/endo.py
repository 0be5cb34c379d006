"""Virtual endomorphisms: morphism test, invariant-ideal core, simplicity at precision."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import NotClosed, PrecisionExhausted
from .lattice import LieLattice
from .linalg import Matrix, solve_in_span
from .submodule import Submodule, enumerate_subalgebras, is_closed, largest_ideal_in

DEFAULT_GUARD = 4


@dataclass(frozen=True)
class VirtualEndomorphism:
    """``domain`` is a subalgebra; column j of ``map`` is the image of its j-th Hermite basis vector."""

    domain: Submodule
    map: Matrix

    def image(self, v) -> tuple[int, ...]:
        c = solve_in_span(self.domain.hermite, v)
        if c is None:
            raise NotClosed(f"{v} is not in the domain")
        return self.map.apply([x.residue for x in c])

    def sort_key(self):
        return (self.domain.k_vector, self.domain.hermite.data, self.map.data)


@dataclass(frozen=True)
class Verdict:
    simple: bool
    core: Submodule | None
    precision: int
    guard: int

    def __str__(self):
        if self.simple:
            return f"SimpleAtPrecision(N={self.precision}, guard={self.guard})"
        return f"NotSimple(core k={self.core.k_vector}, N={self.precision}, guard={self.guard})"


def identity_endomorphism(M: Submodule) -> VirtualEndomorphism:
    return VirtualEndomorphism(M, M.hermite)


def zero_endomorphism(M: Submodule) -> VirtualEndomorphism:
    return VirtualEndomorphism(M, Matrix.from_rows([[0] * 3] * 3, M.prime, M.precision))


def is_morphism(L: LieLattice, phi: VirtualEndomorphism) -> bool:
    """``phi[y_i, y_j] == [phi y_i, phi y_j]`` on the domain basis.

    Domain coordinates are known to ``N - index`` digits, so that is the precision
    of the comparison.
    """
    M = phi.domain
    if not is_closed(L, M):
        return False
    n = min(M.precision, phi.map.precision) - M.index_exponent
    if n < 1:
        raise PrecisionExhausted("no digits left to compare")
    mod = L.prime**n
    b = M.basis()
    imgs = phi.map.columns()
    for i, j in ((0, 1), (0, 2), (1, 2)):
        lhs = phi.image(L.bracket(b[i], b[j]))
        rhs = L.bracket(imgs[i], imgs[j])
        if any((x - y) % mod for x, y in zip(lhs, rhs)):
            return False
    return True


def _trivial(J: Submodule, guard: int) -> bool:
    return not J.is_full_rank or J.index_exponent > 3 * (J.precision - guard)


def phi_core(L: LieLattice, phi: VirtualEndomorphism, guard: int = DEFAULT_GUARD) -> Submodule | None:
    """Largest phi-invariant ideal of L, or ``None`` when it is invisible at precision.

    Descending iteration ``J <- largest ideal in (J meet phi^-1(J))`` from the domain.
    """
    M = phi.domain
    n = min(M.precision, phi.map.precision)
    M = M.at_precision(n)
    J = M
    for _ in range(3 * n + 1):
        if _trivial(J, guard):
            return None
        pre = J.preimage(phi.map)
        pre_amb = Submodule.span((M.hermite @ pre.hermite).columns(), L.prime, n)
        nxt = largest_ideal_in(L, J.intersect(pre_amb))
        if nxt == J:
            return J
        J = nxt
    raise PrecisionExhausted("core iteration exceeded 3N steps")


def is_simple_at_precision(L: LieLattice, phi: VirtualEndomorphism,
                           guard: int = DEFAULT_GUARD) -> Verdict:
    core = phi_core(L, phi, guard)
    n = min(phi.domain.precision, phi.map.precision)
    return Verdict(core is None, core, n, guard)


def is_phi_invariant(L: LieLattice, phi: VirtualEndomorphism, I: Submodule) -> bool:
    from .submodule import is_ideal

    if not I.issubset(phi.domain) or not is_ideal(L, I, method="bracket"):
        return False
    return all(I.contains(phi.image(v)) for v in I.at_precision(phi.domain.precision).basis())


def random_morphism_search(L: LieLattice, k: int, trials: int, seed,
                           guard: int = DEFAULT_GUARD):
    """Sample maps on index-p^k subalgebras; keep the morphisms with their verdicts.

    Half the draws are uniform matrices mod p^N; the other half compose the
    inclusion with a random sign change of the basis. Output is sorted by domain
    then map and deduplicated, so it does not depend on sampling order.
    """
    if trials <= 0:
        return []
    rng = random.Random(seed)
    subs = enumerate_subalgebras(L, k)
    p, n = L.prime, L.precision
    mod = p**n
    found = {}
    for _ in range(trials):
        M = subs[rng.randrange(len(subs))]
        if rng.random() < 0.5:
            rows = [[rng.randrange(mod) for _ in range(3)] for _ in range(3)]
            A = Matrix.from_rows(rows, p, n)
        else:
            signs = [rng.choice((1, -1)) for _ in range(3)]
            A = Matrix.diag(signs, p, n) @ M.hermite
        phi = VirtualEndomorphism(M, A)
        if phi.sort_key() in found or not is_morphism(L, phi):
            continue
        found[phi.sort_key()] = (phi, is_simple_at_precision(L, phi, guard))
    return [found[key] for key in sorted(found)]
