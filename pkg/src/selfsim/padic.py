"""p-adic integers known modulo an explicit power of p."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .errors import NotAUnit, NotDivisible, PrecisionExhausted

DEFAULT_PRECISION = 64


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, int) or not is_prime(p):
        raise ValueError(f"{p!r} is not a prime")
    return p


@dataclass(frozen=True, slots=True)
class BottomAtPrecision:
    """Valuation of a scalar that is zero modulo p^N: the true value is >= N."""

    precision: int

    def __repr__(self):
        return f"BottomAtPrecision(>={self.precision})"


def int_valuation(n: int, p: int, cap: int | None = None) -> int | None:
    """Exact p-adic valuation of an integer; ``None`` for zero (or when >= cap)."""
    if n == 0:
        return None
    v = 0
    while n % p == 0:
        n //= p
        v += 1
        if cap is not None and v >= cap:
            return None
    return v


def valuation_mod(residue: int, p: int, precision: int) -> int | None:
    """Valuation of ``residue`` mod p^precision, ``None`` when it vanishes there."""
    return int_valuation(residue % p**precision, p, cap=precision)


@dataclass(frozen=True, slots=True)
class PAdicScalar:
    prime: int
    abs_precision: int
    residue: int

    def __post_init__(self):
        check_prime(self.prime)
        if self.abs_precision < 1:
            raise ValueError("abs_precision must be >= 1")
        mod = self.prime**self.abs_precision
        if not 0 <= self.residue < mod:
            object.__setattr__(self, "residue", self.residue % mod)

    @classmethod
    def of(cls, value: int, prime: int, precision: int = DEFAULT_PRECISION) -> PAdicScalar:
        return cls(prime, precision, value % prime**precision)

    @classmethod
    def from_unit_valuation(cls, unit: int, valuation: int, prime: int,
                            precision: int = DEFAULT_PRECISION) -> PAdicScalar:
        """``unit * p**valuation``; the unit need not actually be a unit."""
        if valuation >= precision:
            return cls(prime, precision, 0)
        mod = prime**precision
        return cls(prime, precision, (unit % mod) * pow(prime, valuation, mod) % mod)

    @property
    def modulus(self) -> int:
        return self.prime**self.abs_precision

    def valuation(self) -> int | BottomAtPrecision:
        v = int_valuation(self.residue, self.prime)
        if v is None:
            return BottomAtPrecision(self.abs_precision)
        return v

    def is_zero(self) -> bool:
        return self.residue == 0

    def is_unit(self) -> bool:
        return self.residue % self.prime != 0

    def unit_part(self) -> PAdicScalar:
        """u with self = u * p^v, at precision N - v."""
        v = self.valuation()
        if isinstance(v, BottomAtPrecision):
            raise NotDivisible("zero at precision has no unit part")
        return PAdicScalar(self.prime, self.abs_precision - v, self.residue // self.prime**v)

    def lift(self) -> int:
        """Signed representative in (-p^N/2, p^N/2]."""
        m = self.modulus
        r = self.residue
        return r - m if r > m // 2 else r

    def with_precision(self, precision: int) -> PAdicScalar:
        if precision > self.abs_precision:
            raise PrecisionExhausted(
                f"cannot raise precision from {self.abs_precision} to {precision}")
        return PAdicScalar(self.prime, precision, self.residue)

    def _coerce(self, other) -> PAdicScalar:
        if isinstance(other, PAdicScalar):
            if other.prime != self.prime:
                raise ValueError("mixed primes")
            return other
        if isinstance(other, int):
            return PAdicScalar(self.prime, self.abs_precision, other % self.modulus)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        n = min(self.abs_precision, o.abs_precision)
        return PAdicScalar(self.prime, n, (self.residue + o.residue) % self.prime**n)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        n = min(self.abs_precision, o.abs_precision)
        return PAdicScalar(self.prime, n, (self.residue - o.residue) % self.prime**n)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        n = min(self.abs_precision, o.abs_precision)
        return PAdicScalar(self.prime, n, (self.residue * o.residue) % self.prime**n)

    __rmul__ = __mul__

    def __neg__(self):
        return PAdicScalar(self.prime, self.abs_precision, -self.residue % self.modulus)

    def __repr__(self):
        return f"PAdicScalar(p={self.prime}, N={self.abs_precision}, {self.residue})"


def valuation(a: PAdicScalar) -> int | BottomAtPrecision:
    return a.valuation()


def invert_unit(a: PAdicScalar) -> PAdicScalar:
    if not a.is_unit():
        raise NotAUnit(f"{a!r} is not a unit")
    return PAdicScalar(a.prime, a.abs_precision, pow(a.residue, -1, a.modulus))


def div_exact(a: PAdicScalar, b: PAdicScalar) -> PAdicScalar:
    """c with c*b = a; the result loses v_p(b) digits of precision."""
    if a.prime != b.prime:
        raise ValueError("mixed primes")
    vb = b.valuation()
    if isinstance(vb, BottomAtPrecision):
        raise NotDivisible("division by zero at precision")
    n = min(a.abs_precision, b.abs_precision) - vb
    if n < 1:
        raise PrecisionExhausted(f"dividing by p^{vb} leaves no digits")
    p = a.prime
    ra = a.residue % p ** (n + vb)
    if ra % p**vb:
        raise NotDivisible(f"v(a) < v(b) = {vb}")
    mod = p**n
    ub = (b.residue // p**vb) % mod
    return PAdicScalar(p, n, (ra // p**vb) * pow(ub, -1, mod) % mod)
