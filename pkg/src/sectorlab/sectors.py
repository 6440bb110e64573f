"""Angular statistics of weighted point sets in narrow sectors.

Windows are half-open [theta, theta+width) and wrap modulo pi/2. The
variance integral is computed exactly (up to double rounding) by a
sweep over window entry/exit breakpoints; pair-proximity sums use the
exact integer separation predicate from the gaussian module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .gaussian import (
    CanonicalElement,
    GaussianInt,
    IndeterminateSeparation,
    SinSquaredBracket,
    angular_separation_leq,
    canonicalize,
)

QUARTER = math.pi / 2

__all__ = [
    "WeightedPointSet",
    "SectorWindow",
    "VarianceReport",
    "PairProximityReport",
    "window_sum",
    "exact_window_variance",
    "covered_measure",
    "pair_proximity_sum",
    "sector_count_bound_check",
]


class WeightedPointSet:
    """Immutable weighted set of first-quadrant Gaussian integers.

    Backed by integer coordinate arrays plus float weights; exact rational
    weights are kept when supplied so pair sums and partition identities
    can be evaluated without rounding.
    """

    def __init__(
        self,
        re: np.ndarray,
        im: np.ndarray,
        weights: np.ndarray,
        x: float,
        label: str = "",
        exact_weights: Optional[Sequence[Fraction]] = None,
    ):
        self.re = np.asarray(re, dtype=np.int64)
        self.im = np.asarray(im, dtype=np.int64)
        self.weights = np.asarray(weights, dtype=np.float64)
        if not (len(self.re) == len(self.im) == len(self.weights)):
            raise ValueError("coordinate and weight arrays must align")
        if np.any(self.re <= 0) or np.any(self.im < 0):
            raise ValueError("points must lie in the first quadrant (re>0, im>=0)")
        if np.any(self.weights < 0):
            raise ValueError("weights must be nonnegative")
        self.x = float(x)
        self.label = label
        self.exact_weights = list(exact_weights) if exact_weights is not None else None
        self.angles = np.arctan2(self.im.astype(np.float64), self.re.astype(np.float64))

    @classmethod
    def from_pairs(
        cls,
        pairs: Sequence[tuple[CanonicalElement, Fraction]],
        x: float,
        label: str = "",
    ) -> "WeightedPointSet":
        re = np.array([p.value.re for p, _ in pairs], dtype=np.int64)
        im = np.array([p.value.im for p, _ in pairs], dtype=np.int64)
        w = np.array([float(f) for _, f in pairs], dtype=np.float64)
        return cls(re, im, w, x, label, exact_weights=[f for _, f in pairs])

    def __len__(self) -> int:
        return len(self.re)

    def total_weight(self) -> float:
        return float(np.sum(self.weights))


@dataclass(frozen=True)
class SectorWindow:
    theta: float
    width: float

    def __post_init__(self):
        if not (0 <= self.theta < QUARTER):
            raise ValueError("theta must lie in [0, pi/2)")
        if not (0 < self.width < QUARTER):
            raise ValueError("width must lie in (0, pi/2)")


@dataclass(frozen=True)
class VarianceReport:
    variance: float
    mean_window_sum: float
    breakpoint_count: int
    normalized_ratio: float
    empty: bool = False


@dataclass(frozen=True)
class PairProximityReport:
    value: float
    close_pair_count: int
    retries: int


def window_sum(
    point_set: WeightedPointSet, window: SectorWindow, exact: bool = False
):
    """Sum of weights over points with wrapped argument in [theta, theta+width)."""
    d = np.mod(point_set.angles - window.theta, QUARTER)
    inside = d < window.width
    if exact:
        if point_set.exact_weights is None:
            raise ValueError("point set carries no exact weights")
        total = Fraction(0)
        for i in np.flatnonzero(inside):
            total += point_set.exact_weights[int(i)]
        return total
    return float(np.sum(point_set.weights[inside]))


def _sweep_segments(positions: np.ndarray, deltas: np.ndarray, start_level: float):
    """Sorted breakpoints -> (segment lengths, level per segment)."""
    order = np.argsort(positions, kind="stable")
    pos = positions[order]
    lev = start_level + np.cumsum(deltas[order])
    bounds = np.concatenate(([0.0], pos, [QUARTER]))
    lengths = np.diff(bounds)
    levels = np.concatenate(([start_level], lev))
    return lengths, levels


def exact_window_variance(point_set: WeightedPointSet, width: float) -> VarianceReport:
    """Integral over theta in [0, pi/2) of |window sum - mean|^2, by sweep.

    A point at angle a lies in the window of theta iff theta is in the
    wrapped arc (a - width, a]; between breakpoints the window sum is
    constant, so the integrand is piecewise constant.
    """
    if not (0 < width < QUARTER):
        raise ValueError("width must lie in (0, pi/2)")
    n = len(point_set)
    if n == 0:
        return VarianceReport(0.0, 0.0, 0, 0.0, empty=True)
    w = point_set.weights
    a = point_set.angles
    total = float(np.sum(w))
    mean = width * total / QUARTER

    entries = np.mod(a - width, QUARTER)
    start_level = float(np.sum(w[a < width]))
    positions = np.concatenate([entries, a])
    deltas = np.concatenate([w, -w])
    lengths, levels = _sweep_segments(positions, deltas, start_level)

    dev = levels - mean
    terms = lengths * dev * dev
    if len(terms) <= 100_000:
        variance = math.fsum(terms.tolist())
        mean_observed = math.fsum((lengths * levels).tolist()) / QUARTER
    else:
        variance = float(np.sum(terms))
        mean_observed = float(np.sum(lengths * levels)) / QUARTER
    variance = max(variance, 0.0)
    logx = math.log(point_set.x) if point_set.x > 1 else float("nan")
    ratio = variance / (width * width / (logx * logx)) if logx == logx else float("nan")
    return VarianceReport(variance, mean_observed, 2 * n, ratio)


def covered_measure(point_set: WeightedPointSet, width: float) -> float:
    """Lebesgue measure of theta whose window holds >= 1 positive-weight point."""
    if not (0 < width < QUARTER):
        raise ValueError("width must lie in (0, pi/2)")
    pos = point_set.weights > 0
    if not np.any(pos):
        return 0.0
    a = point_set.angles[pos]
    ones = np.ones(len(a))
    entries = np.mod(a - width, QUARTER)
    start_level = float(np.sum(a < width))
    positions = np.concatenate([entries, a])
    deltas = np.concatenate([ones, -ones])
    lengths, levels = _sweep_segments(positions, deltas, start_level)
    return float(np.sum(lengths[levels > 0.5]))


def _close_pairs(
    point_set: WeightedPointSet, bracket: SinSquaredBracket, max_retries: int = 12
) -> tuple[list[tuple[int, int]], int]:
    """Index pairs i<j with exact angular separation <= the bracket angle.

    Float angles only shortlist candidates (threshold + margin); the exact
    integer predicate decides each one, refining the bracket on demand.
    """
    n = len(point_set)
    order = np.argsort(point_set.angles, kind="stable")
    ang = point_set.angles[order]
    thr = bracket.angle_float
    margin = 1e-9 + 1e-12 * thr
    pairs: list[tuple[int, int]] = []
    retries = 0

    ext_ang = np.concatenate([ang, ang + QUARTER])
    ext_idx = np.concatenate([order, order])
    re, im = point_set.re, point_set.im

    for pos in range(n):
        a0 = ang[pos]
        hi = np.searchsorted(ext_ang, a0 + thr + margin, side="right")
        for pos2 in range(pos + 1, hi):
            i, j = int(ext_idx[pos]), int(ext_idx[pos2])
            if i == j:
                continue
            z1 = GaussianInt(int(re[i]), int(im[i]))
            z2 = GaussianInt(int(re[j]), int(im[j]))
            for _ in range(max_retries):
                try:
                    if angular_separation_leq(z1, z2, bracket):
                        a, b = min(i, j), max(i, j)
                        pairs.append((a, b))
                    break
                except IndeterminateSeparation:
                    bracket.refine()
                    retries += 1
            else:
                raise IndeterminateSeparation(
                    "bracket still indeterminate after maximum refinements"
                )
    return sorted(set(pairs)), retries


def pair_proximity_sum(point_set: WeightedPointSet, T: int) -> PairProximityReport:
    """T times the sum of w1*w2 over ordered pairs (diagonal included) whose
    wrapped angular separation is at most 1/T, decided exactly."""
    if T < 1:
        raise ValueError("T must be a positive integer")
    bracket = SinSquaredBracket(Fraction(1, T))
    pairs, retries = _close_pairs(point_set, bracket)
    if point_set.exact_weights is not None:
        ws = point_set.exact_weights
        total = sum((w * w for w in ws), Fraction(0))
        total += 2 * sum((ws[i] * ws[j] for i, j in pairs), Fraction(0))
        return PairProximityReport(float(T * total), len(pairs), retries)
    w = point_set.weights
    diag = math.fsum((float(x) * float(x) for x in w))
    off = math.fsum(float(w[i]) * float(w[j]) for i, j in pairs)
    return PairProximityReport(T * (diag + 2 * off), len(pairs), retries)


def sector_count_bound_check(
    n: GaussianInt, N: int, v: float
) -> tuple[int, float]:
    """Count lattice points m (canonical, N(m) <= N) with wrapped angular
    distance to n strictly inside (0, v/N); returns (count, count/v)."""
    if n.is_zero():
        raise ValueError("reference point must be nonzero")
    if n.norm() > N:
        raise ValueError("reference norm exceeds N")
    thr = v / N
    c = canonicalize(n).value
    cre, cim = c.re, c.im
    a0 = math.atan2(cim, cre)
    amax = math.isqrt(N)
    count = 0
    for a in range(1, amax + 1):
        bmax = math.isqrt(N - a * a)
        b = np.arange(0, bmax + 1, dtype=np.int64)
        ang = np.arctan2(b.astype(np.float64), float(a))
        d = np.abs(ang - a0)
        d = np.minimum(d, QUARTER - d)
        near = d < thr
        if not np.any(near):
            continue
        # exclude the ray of n exactly (integer cross product)
        cross = b[near] * cre - a * cim
        count += int(np.sum(cross != 0))
    return count, count / v if v > 0 else float("inf")
