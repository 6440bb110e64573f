"""Large-value thresholds and the exact feasibility case analysis.

Every threshold is an exact rational evaluated at epsilon = 0; the order
constants 15.1 and 19.2 carry their slack through strict inequalities,
except the amplifier-exponent check which binds with equality at 15.1
and is therefore non-strict.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .exppairs import ExactPair

Rational = Union[Fraction, int, str]

# Rounded pair used by default in the feasibility chain, and its exact
# preimage under the generating word AAABAAB; the second pair is exact
# either way (0.05 = 1/20, 0.825 = 33/40).
ROUNDED_PAIR_ONE = ExactPair(Fraction("0.02381"), Fraction("0.8929"))
EXACT_PAIR_ONE = ExactPair(Fraction(1, 42), Fraction(25, 28))
PAIR_TWO = ExactPair(Fraction(1, 20), Fraction(33, 40))

# Displayed decimals of the order-two case analysis, kept as exact rationals:
# 0.2509 = delta at beta=1/2 with delta = 0.7509 - beta; 14.1 = half the
# reciprocal amplifier exponent 5/141.
DELTA_AT_HALF = Fraction("0.2509")
DELTA_OFFSET = Fraction("0.7509")
AMPLIFIER_A = Fraction("14.1")
AMPLIFIER_EXPONENT = Fraction(5, 141)

__all__ = [
    "LargeValueExponents",
    "AdmissibleSigmaInterval",
    "CheckResult",
    "CaseReport",
    "lvt_exponents",
    "density1_sigma_interval",
    "density2_sigma_interval",
    "verify_constant",
    "minimal_constant",
    "ROUNDED_PAIR_ONE",
    "EXACT_PAIR_ONE",
    "PAIR_TWO",
]


def _rat(x: Rational) -> Fraction:
    return Fraction(x)


@dataclass(frozen=True)
class LargeValueExponents:
    huxley: Optional[Fraction]
    mvt: Optional[Fraction]
    huxley_error: Optional[str] = None
    mvt_error: Optional[str] = None


def lvt_exponents(a: Rational, sigma: Rational) -> LargeValueExponents:
    """Large-value count exponents for prime-supported polynomials of
    length (log T)^a: 1/(3a/2 - 3) + 8*sigma (needs a > 2) and the
    mean-value route 1/a + 2*sigma (needs a > 1)."""
    a, sigma = _rat(a), _rat(sigma)
    hux: Optional[Fraction] = None
    hux_err = mvt_err = None
    mvt: Optional[Fraction] = None
    if a > 2:
        hux = 1 / (Fraction(3, 2) * a - 3) + 8 * sigma
    else:
        hux_err = "requires a > 2"
    if a > 1:
        mvt = 1 / a + 2 * sigma
    else:
        mvt_err = "requires a > 1"
    return LargeValueExponents(hux, mvt, hux_err, mvt_err)


@dataclass(frozen=True)
class AdmissibleSigmaInterval:
    lower: Fraction
    upper: Fraction
    source: str  # "density1_pair" | "density1_smooth" | "density2"
    pair: Optional[ExactPair] = None
    beta: Fraction = Fraction(0)
    delta: Optional[Fraction] = None
    amp: Optional[Fraction] = None
    lower_flag: str = ""

    @property
    def empty(self) -> bool:
        return self.lower > self.upper


def density1_sigma_interval(
    beta: Rational, variant: str, pair: Optional[ExactPair] = None
) -> AdmissibleSigmaInterval:
    """Admissible sigma range for the plain density bound at epsilon = 0.

    Variant "i" (exponent-pair route, beta >= 2/5, pair required):
        upper = ((kappa-lambda+1)/(2 kappa) * beta - 1) / ((2 + 2/kappa) beta - 2).
    Variant "ii" (one-third route, beta >= 2/3):
        upper = ((3/2) beta - 1) / (8 beta - 2).
    The true lower endpoint is a large multiple of epsilon; at epsilon = 0
    it is recorded as 0 with a flag.
    """
    beta = _rat(beta)
    flag = "paper requires sigma >= C*epsilon; evaluated at epsilon = 0"
    if variant == "i":
        if pair is None:
            raise ValueError("variant i needs an exponent pair")
        if beta < Fraction(2, 5):
            raise ValueError("variant i requires beta >= 2/5")
        if pair.kappa == 0:
            raise ValueError("variant i requires kappa > 0")
        num = (pair.kappa - pair.lam + 1) / (2 * pair.kappa) * beta - 1
        den = (2 + 2 / pair.kappa) * beta - 2
        upper = num / den
        return AdmissibleSigmaInterval(
            Fraction(0), upper, "density1_pair", pair=pair, beta=beta, lower_flag=flag
        )
    if variant == "ii":
        if beta < Fraction(2, 3):
            raise ValueError("variant ii requires beta >= 2/3")
        upper = (Fraction(3, 2) * beta - 1) / (8 * beta - 2)
        return AdmissibleSigmaInterval(
            Fraction(0), upper, "density1_smooth", beta=beta, lower_flag=flag
        )
    raise ValueError(f"unknown variant {variant!r}")


def density2_sigma_interval(
    beta: Rational, delta: Rational, amp: Rational
) -> AdmissibleSigmaInterval:
    """Admissible sigma range for the amplified density bound at epsilon = 0:
    [delta/(A(2-2beta)), ((3/2)(beta+delta) - 1 - 4 delta/A)/(8 beta - 2)]."""
    beta, delta, amp = _rat(beta), _rat(delta), _rat(amp)
    if not (Fraction(2, 5) <= beta < 1):
        raise ValueError("requires beta in [2/5, 1)")
    if delta <= 0:
        if delta == 0:
            # degenerate: collapses to the plain variant-ii shape
            upper = (Fraction(3, 2) * beta - 1) / (8 * beta - 2)
            return AdmissibleSigmaInterval(
                Fraction(0), upper, "density2", beta=beta, delta=delta, amp=amp
            )
        raise ValueError("requires delta >= 0")
    if amp < 2:
        raise ValueError("requires amplification order A >= 2")
    lower = delta / (amp * (2 - 2 * beta))
    upper = (Fraction(3, 2) * (beta + delta) - 1 - 4 * delta / amp) / (8 * beta - 2)
    return AdmissibleSigmaInterval(
        lower, upper, "density2", beta=beta, delta=delta, amp=amp
    )


@dataclass(frozen=True)
class CheckResult:
    name: str
    lhs: Fraction
    rhs: Fraction
    relation: str  # "<", ">", "<="
    passed: bool

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
            "relation": self.relation,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class CaseReport:
    C: Fraction
    mode: str
    pairs: str
    checks: tuple[CheckResult, ...]
    feasible: bool = field(default=False)

    def as_dict(self) -> dict:
        return {
            "C": str(self.C),
            "mode": self.mode,
            "pairs": self.pairs,
            "feasible": self.feasible,
            "checks": [c.as_dict() for c in self.checks],
        }


def _check(name: str, lhs: Fraction, relation: str, rhs: Fraction) -> CheckResult:
    ok = {"<": lhs < rhs, ">": lhs > rhs, "<=": lhs <= rhs}[relation]
    return CheckResult(name, lhs, rhs, relation, ok)


def verify_constant(
    C: Rational, mode: str, pairs: str = "rounded"
) -> CaseReport:
    """Evaluate the full inequality chain for a candidate order constant C.

    mode "e2": the products-of-two chain — the large-value ceiling
    1/((3/2)(C-1) - 3)/2 must be strictly beaten by the case-1 bound 1/32
    and by the amplified case-2 upper endpoint; the case-2 lower endpoint
    must sit strictly below the pointwise sigma lower bound (1-3k-l)/2;
    the case-3 bound 1/52 must strictly exceed the assumed 0.2509/(C-1);
    and the amplifier exponent needs 1/(2(C-1)) <= 5/141.
    mode "e3": the single coupling 1/(C-1) < 20/363.
    Everything is evaluated at epsilon = 0 in exact rationals.
    """
    C = _rat(C)
    mode = mode.lower()
    if C <= 2:
        raise ValueError("C must exceed 2")
    if pairs not in ("rounded", "exact"):
        raise ValueError("pairs must be 'rounded' or 'exact'")
    a = C - 1
    checks: list[CheckResult] = []
    if mode == "e3":
        checks.append(_check("coupling 1/(C-1) < 20/363", 1 / a, "<", Fraction(20, 363)))
    elif mode == "e2":
        pair_one = ROUNDED_PAIR_ONE if pairs == "rounded" else EXACT_PAIR_ONE
        denom = Fraction(3, 2) * a - 3
        checks.append(_check("huxley exponent defined (3(C-1)/2 > 3)", denom, ">", Fraction(0)))
        if denom > 0:
            ceiling = (1 / denom) / 2
            d1 = density1_sigma_interval(Fraction(3, 4), "ii")
            checks.append(
                _check("case1: density bound 1/32 above ceiling", d1.upper, ">", ceiling)
            )
            d2 = density2_sigma_interval(Fraction(1, 2), DELTA_AT_HALF, AMPLIFIER_A)
            sigma_lower = (1 - 3 * pair_one.kappa - pair_one.lam) / 2
            checks.append(
                _check(
                    "case2: amplified lower below pointwise sigma bound",
                    d2.lower,
                    "<",
                    sigma_lower,
                )
            )
            checks.append(
                _check("case2: amplified upper above ceiling", d2.upper, ">", ceiling)
            )
            d3 = density1_sigma_interval(Fraction(2, 3), "i", PAIR_TWO)
            checks.append(
                _check(
                    "case3: pair bound above assumed sigma",
                    d3.upper,
                    ">",
                    DELTA_AT_HALF / a,
                )
            )
            checks.append(
                _check(
                    "amplifier exponent 1/(2(C-1)) <= 5/141",
                    1 / (2 * a),
                    "<=",
                    AMPLIFIER_EXPONENT,
                )
            )
    else:
        raise ValueError(f"unknown mode {mode!r}, expected e2 or e3")
    feasible = all(c.passed for c in checks)
    return CaseReport(C, mode, pairs, tuple(checks), feasible)


def minimal_constant(
    mode: str, tol: Rational, pairs: str = "rounded"
) -> Fraction:
    """Bisect for the least feasible C: infeasible at C*-tol, feasible at
    C*+tol. Feasibility is monotone in C (every check loosens as C grows)."""
    tol = _rat(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")
    lo = Fraction(4)
    if verify_constant(lo, mode, pairs).feasible:
        raise AssertionError("expected infeasibility at C = 4")
    hi = Fraction(8)
    while not verify_constant(hi, mode, pairs).feasible:
        hi *= 2
        if hi > 1 << 20:
            raise ArithmeticError("no feasible C found")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if verify_constant(mid, mode, pairs).feasible:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2
