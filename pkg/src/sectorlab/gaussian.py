"""Exact Gaussian-integer arithmetic and canonicalization.

Everything here is exact: integers are arbitrary precision, angular
comparisons are decided by integer cross products against rational
brackets of sin^2(threshold), and prime splitting is deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

MAX_COMPONENT = 1 << 62

__all__ = [
    "GaussianInt",
    "CanonicalElement",
    "PrimeClassification",
    "IndeterminateSeparation",
    "SinSquaredBracket",
    "canonicalize",
    "norm",
    "arg_mod_quarter",
    "angular_separation_leq",
    "sqrt_minus_one_mod_prime",
    "split_rational_prime",
    "tau_gaussian",
    "gaussian_gcd",
    "gaussian_factorization",
    "is_prime",
]


@dataclass(frozen=True)
class GaussianInt:
    """A Gaussian integer a+bi with |a|, |b| <= 2^62."""

    re: int
    im: int

    def __post_init__(self):
        if abs(self.re) > MAX_COMPONENT or abs(self.im) > MAX_COMPONENT:
            raise ValueError("Gaussian integer component exceeds 2^62 in magnitude")

    def __mul__(self, other: "GaussianInt") -> "GaussianInt":
        return GaussianInt(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def conj(self) -> "GaussianInt":
        return GaussianInt(self.re, -self.im)

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def rotate(self) -> "GaussianInt":
        """Multiply by i."""
        return GaussianInt(-self.im, self.re)

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        return f"{self.re}{self.im:+}i"


@dataclass(frozen=True)
class CanonicalElement:
    """First-quadrant associate (re > 0, im >= 0) with the rotation count.

    value = i^unit_exponent * original.
    """

    value: GaussianInt
    unit_exponent: int

    def __post_init__(self):
        if not (self.value.re > 0 and self.value.im >= 0):
            raise ValueError("canonical value must satisfy re > 0, im >= 0")
        if self.unit_exponent not in (0, 1, 2, 3):
            raise ValueError("unit exponent must lie in {0,1,2,3}")

    def norm(self) -> int:
        return self.value.norm()


@dataclass(frozen=True)
class PrimeClassification:
    kind: str  # "ramified" | "split" | "inert"
    primes: tuple[CanonicalElement, ...]


class IndeterminateSeparation(Exception):
    """The integer test landed strictly inside the sin^2 bracket; widen it."""


def norm(z: GaussianInt) -> int:
    """Exact norm re^2 + im^2."""
    return z.norm()


def canonicalize(z: GaussianInt) -> CanonicalElement:
    """Unique first-quadrant associate and the number of i-rotations applied."""
    if z.is_zero():
        raise ValueError("zero has no canonical associate")
    w = z
    for k in range(4):
        if w.re > 0 and w.im >= 0:
            return CanonicalElement(w, k)
        w = w.rotate()
    raise AssertionError("unreachable: some rotation lands in the first quadrant")


def arg_mod_quarter(z: GaussianInt) -> float:
    """Argument of the canonical associate, in [0, pi/2)."""
    c = canonicalize(z).value
    return math.atan2(c.im, c.re)


def _mpf_to_fraction(x) -> Fraction:
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    if man == 0:
        return Fraction(0)
    v = Fraction(man) * Fraction(2) ** exp
    return -v if sign else v


class SinSquaredBracket:
    """Exact rational bracket [lo, hi] around sin^2(threshold angle).

    The threshold is a rational number of radians, optionally times pi.
    refine() tightens the bracket by recomputing at doubled precision.
    """

    def __init__(self, angle: Fraction, pi_multiple: bool = False, prec: int = 120):
        if angle < 0:
            raise ValueError("threshold angle must be nonnegative")
        self.angle = Fraction(angle)
        self.pi_multiple = pi_multiple
        self.prec = prec
        self._compute()

    def _compute(self) -> None:
        with mpmath.workprec(self.prec):
            t = mpmath.mpf(self.angle.numerator) / self.angle.denominator
            if self.pi_multiple:
                t *= mpmath.pi
            self.angle_float = float(t)
            s2 = mpmath.sin(t) ** 2
            # mpmath results are correct to ~1 ulp at working precision;
            # pad by a few bits in each direction.
            pad = mpmath.mpf(2) ** (8 - self.prec)
            lo = s2 * (1 - pad)
            hi = s2 * (1 + pad)
        self.lo = max(Fraction(0), _mpf_to_fraction(lo))
        self.hi = _mpf_to_fraction(hi)

    def refine(self) -> None:
        self.prec *= 2
        self._compute()

    @property
    def covers_everything(self) -> bool:
        # Angular distances mod pi/2 never exceed pi/4.
        return self.angle_float >= math.pi / 4


def angular_separation_leq(
    n1: GaussianInt, n2: GaussianInt, bracket: SinSquaredBracket
) -> bool:
    """Decide |arg n1 - arg n2| <= threshold (arguments mod pi/2), exactly.

    With c = n1 * conj(n2), the circular distance d of the two arguments on
    the circle of circumference pi/2 satisfies
    sin(d) = min(|Im c|, |Re c|) / sqrt(N(n1)N(n2)); the Re slot handles the
    wraparound, since rotating n2 by i swaps Re and Im. The comparison
    sin^2(d) <= sin^2(threshold) is then a pure integer test against the
    rational bracket.

    Raises IndeterminateSeparation when the test lands strictly inside the
    bracket; the caller should bracket.refine() and retry.
    """
    if n1.is_zero() or n2.is_zero():
        raise ValueError("angular separation undefined for zero")
    if bracket.covers_everything:
        return True
    c_re = n1.re * n2.re + n1.im * n2.im
    c_im = n1.im * n2.re - n1.re * n2.im
    m = min(c_re * c_re, c_im * c_im)
    q = n1.norm() * n2.norm()
    # m <= lo*q  =>  definitely within;  m > hi*q  =>  definitely outside.
    if m * bracket.lo.denominator <= bracket.lo.numerator * q:
        return True
    if m * bracket.hi.denominator > bracket.hi.numerator * q:
        return False
    raise IndeterminateSeparation(
        f"integer test inside bracket for {n1} vs {n2}; refine the bracket"
    )


# Deterministic Miller-Rabin, valid for all n < 3.3 * 10^24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def sqrt_minus_one_mod_prime(p: int) -> int:
    """Smallest t in [0, p/2] with t^2 = -1 (mod p); p = 2 or p = 1 (mod 4)."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2:
        return 1
    if p % 4 != 1:
        raise ValueError(f"no root: -1 is a non-residue modulo {p}")
    # For a quadratic non-residue a, t = a^((p-1)/4) satisfies t^2 = -1.
    a = 2
    while pow(a, (p - 1) // 2, p) != p - 1:
        a += 1
    t = pow(a, (p - 1) // 4, p)
    return min(t, p - t)


def gaussian_gcd(a: GaussianInt, b: GaussianInt) -> GaussianInt:
    """Euclidean gcd in Z[i] (up to units), by nearest-integer division."""
    while not b.is_zero():
        nb = b.norm()
        t = a * b.conj()
        qr = (2 * t.re + nb) // (2 * nb)
        qi = (2 * t.im + nb) // (2 * nb)
        q = GaussianInt(qr, qi)
        a, b = b, GaussianInt(a.re - (q * b).re, a.im - (q * b).im)
    return a


def split_rational_prime(p: int) -> PrimeClassification:
    """Classify a rational prime in Z[i] with canonical Gaussian primes."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2:
        return PrimeClassification("ramified", (canonicalize(GaussianInt(1, 1)),))
    if p % 4 == 3:
        return PrimeClassification("inert", (canonicalize(GaussianInt(p, 0)),))
    t = sqrt_minus_one_mod_prime(p)
    g = gaussian_gcd(GaussianInt(p, 0), GaussianInt(t, 1))
    c = canonicalize(g).value
    a, b = max(c.re, c.im), min(c.re, c.im)
    # Both conjugate-distinct associates, ordered by re descending.
    return PrimeClassification(
        "split",
        (
            CanonicalElement(GaussianInt(a, b), 0),
            CanonicalElement(GaussianInt(b, a), 0),
        ),
    )


def _factor_int(n: int) -> dict[int, int]:
    """Factor a positive integer; trial division then Pollard rho."""
    factors: dict[int, int] = {}
    for p in (2, 3, 5):
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    d = 7
    wheel = (4, 2, 4, 2, 4, 6, 2, 6)
    i = 0
    while d * d <= n and d < 1_000_000:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += wheel[i]
        i = (i + 1) % 8
    if n > 1:
        for p in _factor_large(n):
            factors[p] = factors.get(p, 0) + 1
    return factors


def _factor_large(n: int) -> list[int]:
    if n == 1:
        return []
    if is_prime(n):
        return [n]
    d = _pollard_rho(n)
    return _factor_large(d) + _factor_large(n // d)


def _pollard_rho(n: int) -> int:
    if n % 2 == 0:
        return 2
    c = 1
    while True:
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
        c += 1


def _divides(p: GaussianInt, n: GaussianInt) -> bool:
    np_ = p.norm()
    t = n * p.conj()
    return t.re % np_ == 0 and t.im % np_ == 0


def _exact_div(n: GaussianInt, p: GaussianInt) -> GaussianInt:
    np_ = p.norm()
    t = n * p.conj()
    return GaussianInt(t.re // np_, t.im // np_)


def gaussian_factorization(n: GaussianInt) -> list[tuple[CanonicalElement, int]]:
    """Gaussian prime factorization of n (exponents per canonical prime)."""
    if n.is_zero():
        raise ValueError("zero has no factorization")
    result: list[tuple[CanonicalElement, int]] = []
    m = canonicalize(n).value
    for q, e in sorted(_factor_int(m.norm()).items()):
        if q == 2:
            result.append((canonicalize(GaussianInt(1, 1)), e))
            for _ in range(e):
                m = _exact_div(m, GaussianInt(1, 1))
        elif q % 4 == 3:
            assert e % 2 == 0, "inert prime exponent in the norm must be even"
            result.append((canonicalize(GaussianInt(q, 0)), e // 2))
            for _ in range(e // 2):
                m = _exact_div(m, GaussianInt(q, 0))
        else:
            p1, p2 = split_rational_prime(q).primes
            e1 = 0
            while _divides(p1.value, m):
                m = _exact_div(m, p1.value)
                e1 += 1
            e2 = e - e1
            if e1:
                result.append((p1, e1))
            if e2:
                result.append((p2, e2))
                for _ in range(e2):
                    m = _exact_div(m, p2.value)
    return result


def tau_gaussian(n: GaussianInt) -> int:
    """Number of divisors of n in Z[i], counted up to units."""
    return math.prod(e + 1 for _, e in gaussian_factorization(n))
