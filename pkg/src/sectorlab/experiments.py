"""Experiment drivers shared by the CLI and the acceptance suite.

These wire the primitive operations into the standard desk-scale runs:
the sector-variance grid over growing scales, the randomized mean-value
report matrix, and the bundled divisor-verification instances.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .divisor import DivisorInstance, correlation_sum_exact, main_term
from .hecke import HeckeCoefficientVector, mvt_report
from .sectors import WeightedPointSet, covered_measure, exact_window_variance
from .weights import AlmostPrimeConfig, almost_prime_arrays

QUARTER = math.pi / 2

__all__ = [
    "product_window",
    "variance_grid",
    "random_coefficient_vector",
    "mvt_matrix",
    "acceptance_divisor_instances",
]


def product_window(x: int) -> tuple[int, int]:
    """Default norm window for the pinned first factor: [log x, (log x)^2]."""
    lg = math.log(x)
    return (max(2, math.ceil(lg)), math.ceil(lg * lg))


def point_set_for_scale(x: int) -> WeightedPointSet:
    """Products of exactly two Gaussian primes, first factor norm pinned to
    product_window(x), weights 1/N(n), norms in (x, 2x]."""
    cfg = AlmostPrimeConfig(k=2, x=x, factor_windows=(product_window(x),))
    re, im, nm = almost_prime_arrays(cfg)
    return WeightedPointSet(re, im, 1.0 / nm.astype(np.float64), x=float(x), label=f"E2-x{x}")


def variance_grid(
    xs: Sequence[int],
    expectation_target: float = 6.0,
    c: Optional[float] = None,
) -> list[dict]:
    """Variance/coverage cells over a grid of scales with h = c (log x)^2.

    The window constant c is calibrated once at the smallest scale so each
    window expects >= expectation_target points, then held fixed.
    """
    xs = sorted(xs)
    cells = []
    sets = {x: point_set_for_scale(x) for x in xs}
    if c is None:
        x0 = xs[0]
        n0 = len(sets[x0])
        if n0 == 0:
            raise ValueError(f"no points at x = {x0}")
        width_needed = expectation_target * QUARTER / n0
        c = width_needed * x0 / math.log(x0) ** 2
    for x in xs:
        pts = sets[x]
        h = c * math.log(x) ** 2
        width = h / x
        t0 = time.perf_counter()
        rep = exact_window_variance(pts, width)
        cov = covered_measure(pts, width)
        ms = (time.perf_counter() - t0) * 1000
        cells.append(
            {
                "x": x,
                "h": h,
                "width": width,
                "c": c,
                "points": len(pts),
                "expected_per_window": len(pts) * width / QUARTER,
                "variance": rep.variance,
                "normalized_ratio": rep.normalized_ratio,
                "mean_window_sum": rep.mean_window_sum,
                "covered_measure": cov,
                "covered_fraction": cov / QUARTER,
                "runtime_ms": ms,
            }
        )
    return cells


def random_coefficient_vector(
    rng: np.random.Generator, n_max: int, support_max: int = 400
) -> HeckeCoefficientVector:
    """Random sparse coefficient vector on canonical points of norm <= n_max."""
    amax = math.isqrt(n_max)
    pts = [
        (a, b)
        for a in range(1, amax + 1)
        for b in range(0, math.isqrt(n_max - a * a) + 1)
    ]
    size = int(rng.integers(1, min(len(pts), support_max) + 1))
    idx = rng.choice(len(pts), size=size, replace=False)
    entries = {}
    for i in idx:
        re, im = pts[int(i)]
        entries[(re, im)] = complex(rng.normal(), rng.normal())
    return HeckeCoefficientVector(entries, (1, n_max))


def mvt_matrix(
    count: int, seed: int, n_max: int = 500, t_max: int = 200
) -> list[dict]:
    """Randomized mean-value report matrix: per instance, the lhs and the
    two right sides with their ratios."""
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(count):
        n = int(rng.integers(20, n_max + 1))
        T = int(rng.integers(1, t_max + 1))
        coeffs = random_coefficient_vector(rng, n)
        rep = mvt_report(coeffs, T)
        rows.append(
            {
                "N": n,
                "T": T,
                "support": len(coeffs),
                "lhs": rep.lhs,
                "r1": rep.r1,
                "r2": rep.r2,
                "ratio_r1": rep.ratio_r1,
                "ratio_r2": rep.ratio_r2,
                "chain_holds": rep.lhs <= rep.r2,
            }
        )
    return rows


def acceptance_divisor_instances(x: int) -> list[DivisorInstance]:
    """The bundled verification instances at a given scale: k = 1 with
    (T1, T2) in {(1,1), (5,1), (5,13)}."""
    return [
        DivisorInstance.symmetric(x, 1, 1, 1),
        DivisorInstance.symmetric(x, 1, 5, 1),
        DivisorInstance.symmetric(x, 1, 5, 13),
    ]


def divisor_gap_report(inst: DivisorInstance, threads: Optional[int] = None) -> dict:
    """lhs vs main term with the relative gap, as a plain dict."""
    t0 = time.perf_counter()
    lhs = correlation_sum_exact(inst, summation="fast", threads=threads)
    mt = main_term(inst)
    ms = (time.perf_counter() - t0) * 1000
    gap = abs(lhs.value - mt.value) / mt.value if mt.value != 0 else float("nan")
    return {
        "x": inst.x,
        "k": inst.k,
        "T1": inst.T1,
        "T2": inst.T2,
        "lhs": lhs.value,
        "main_term": mt.value,
        "integral": mt.integral,
        "singular_series": mt.singular.value,
        "local_factors": [[p, str(f)] for p, f in mt.singular.local_factors],
        "relative_gap": gap,
        "quadrature_error": mt.quadrature_error,
        "runtime_ms": ms,
    }
