"""Weight sequences supported on Gaussian almost primes and rough numbers.

almost_prime_weights realizes the weight 1/N(n) on products of exactly k
Gaussian primes whose first k-1 factors have norms pinned to given windows;
rough_weights realizes 1/N(n) on numbers all of whose prime factors have
norm beyond a cutoff, except inside declared exempt intervals.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .gaussian import CanonicalElement, GaussianInt, canonicalize
from .sieve import gaussian_prime_norms

__all__ = [
    "AlmostPrimeConfig",
    "RoughNumberFilter",
    "almost_prime_weights",
    "almost_prime_arrays",
    "rough_weights",
    "rough_arrays",
]


@dataclass(frozen=True)
class AlmostPrimeConfig:
    """Product-of-k-primes weight parameters.

    factor_windows pins N(p_j) to [lo_j, hi_j] for j < k (endpoints
    included); the last prime is only constrained by N(n) in (x, 2x].
    """

    k: int
    x: int
    factor_windows: tuple[tuple[int, int], ...]
    epsilon: float = 0.0

    def __post_init__(self):
        if self.k not in (2, 3):
            raise ValueError("k must be 2 or 3")
        if len(self.factor_windows) != self.k - 1:
            raise ValueError(f"need exactly {self.k - 1} factor windows")
        if self.x < 4:
            raise ValueError("x too small")
        for lo, hi in self.factor_windows:
            if not (2 <= lo <= hi):
                raise ValueError(f"bad window [{lo}, {hi}]")
        min_prod = math.prod(lo for lo, _ in self.factor_windows)
        if min_prod * 2 > 2 * self.x:
            raise ValueError("windows incompatible: products cannot land in (x, 2x]")


@dataclass(frozen=True)
class RoughNumberFilter:
    """Admissibility filter: every Gaussian prime factor must have norm
    outside [2, cutoff], except inside the exempt intervals [z_i, z_i^2]."""

    exempt_intervals: tuple[tuple[float, float], ...] = ()
    cutoff: float = 0.0

    def __post_init__(self):
        ivs = sorted(self.exempt_intervals)
        for (a1, b1), (a2, b2) in zip(ivs, ivs[1:]):
            if a2 <= b1:
                raise ValueError("exempt intervals must be pairwise disjoint")
        for a, b in ivs:
            if a < 1 or b < a:
                raise ValueError(f"bad exempt interval [{a}, {b}]")

    def norm_admissible(self, prime_norm: int) -> bool:
        if not (2 <= prime_norm <= self.cutoff):
            return True
        return any(a <= prime_norm <= b for a, b in self.exempt_intervals)


def _prime_products(config: AlmostPrimeConfig) -> dict[tuple[int, int], int]:
    """Canonical coordinates -> norm, for every admissible product."""
    x = config.x
    window_primes = [
        gaussian_prime_norms(lo, hi) for lo, hi in config.factor_windows
    ]
    # Last-factor primes can need norms up to 2x / prod(window los).
    min_prod = math.prod(lo for lo, _ in config.factor_windows)
    tail = gaussian_prime_norms(2, max(2, 2 * x // min_prod))

    out: dict[tuple[int, int], int] = {}

    def descend(idx: int, re: int, im: int, nrm: int) -> None:
        if idx == config.k - 1:
            lo_t = x // nrm + 1
            hi_t = 2 * x // nrm
            i0, i1 = np.searchsorted(tail["norm"], [lo_t, hi_t + 1])
            tr, ti, tn = tail["re"][i0:i1], tail["im"][i0:i1], tail["norm"][i0:i1]
            pr = re * tr - im * ti
            pi = re * ti + im * tr
            # product of first-quadrant elements has argument in [0, pi),
            # one clockwise rotation fixes the upper half
            rot = pr <= 0
            pr2 = np.where(rot, pi, pr)
            pi2 = np.where(rot, -pr, pi)
            pn = nrm * tn
            keep = (x < pn) & (pn <= 2 * x)
            for r, i, n2 in zip(pr2[keep], pi2[keep], pn[keep]):
                out[(int(r), int(i))] = int(n2)
            return
        wp = window_primes[idx]
        for r, i, n in zip(wp["re"], wp["im"], wp["norm"]):
            if nrm * int(n) > 2 * x:
                break
            r2 = re * int(r) - im * int(i)
            i2 = re * int(i) + im * int(r)
            if r2 <= 0:
                r2, i2 = i2, -r2
            descend(idx + 1, r2, i2, nrm * int(n))

    descend(0, 1, 0, 1)
    return out


def almost_prime_weights(
    config: AlmostPrimeConfig,
) -> list[tuple[CanonicalElement, Fraction]]:
    """All n in the first quadrant with x < N(n) <= 2x expressible as a unit
    times p_1...p_k with the pinned factor norms; weight 1/N(n), each n once."""
    prods = _prime_products(config)
    if not prods:
        warnings.warn("almost-prime window is infeasible: no products in range")
        return []
    items = sorted(prods.items(), key=lambda kv: (kv[1], kv[0][1]))
    return [
        (CanonicalElement(GaussianInt(r, i), 0), Fraction(1, n))
        for (r, i), n in items
    ]


def almost_prime_arrays(config: AlmostPrimeConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(re, im, norm) int64 arrays of the weight support, for bulk statistics."""
    prods = _prime_products(config)
    if not prods:
        return (np.empty(0, np.int64),) * 3
    re = np.fromiter((k[0] for k in prods), np.int64, len(prods))
    im = np.fromiter((k[1] for k in prods), np.int64, len(prods))
    nm = np.fromiter(prods.values(), np.int64, len(prods))
    order = np.argsort(nm, kind="stable")
    return re[order], im[order], nm[order]


def _admissible_norm_mask(norms: np.ndarray, filt: RoughNumberFilter) -> np.ndarray:
    """Mask of norms all of whose Gaussian-prime-factor norms pass the filter.

    The Gaussian prime norms dividing n are readable from the rational
    factorization of N(n): q=2 contributes 2, q=1 (mod 4) contributes q,
    q=3 (mod 4) contributes q^2.
    """
    if len(norms) == 0:
        return np.zeros(0, dtype=bool)
    top = int(norms.max())
    spf = np.arange(top + 1, dtype=np.int64)
    for p in range(2, math.isqrt(top) + 1):
        if spf[p] == p:
            sl = spf[p * p :: p]
            sl[sl == np.arange(p * p, top + 1, p)] = p
    mask = np.ones(len(norms), dtype=bool)
    for j, n in enumerate(norms):
        n = int(n)
        while n > 1:
            q = int(spf[n])
            pnorm = 2 if q == 2 else (q if q % 4 == 1 else q * q)
            if not filt.norm_admissible(pnorm):
                mask[j] = False
                break
            while n % q == 0:
                n //= q
    return mask


def _first_quadrant_lattice(lo: float, hi: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Canonical lattice points with norm in [lo, hi]."""
    res, ims, nms = [], [], []
    amax = math.isqrt(int(hi))
    for a in range(1, amax + 1):
        b_hi = math.isqrt(max(0, int(hi) - a * a))
        b = np.arange(0, b_hi + 1, dtype=np.int64)
        n = a * a + b * b
        keep = n >= lo
        res.append(np.full(int(keep.sum()), a, dtype=np.int64))
        ims.append(b[keep])
        nms.append(n[keep])
    return np.concatenate(res), np.concatenate(ims), np.concatenate(nms)


def rough_arrays(
    filt: RoughNumberFilter, x: int, eta: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(re, im, norm) of the admissible support with N(n) in [x, (1+eta)x]."""
    re, im, nm = _first_quadrant_lattice(x, (1 + eta) * x)
    keep = _admissible_norm_mask(nm, filt)
    return re[keep], im[keep], nm[keep]


def rough_weights(
    filt: RoughNumberFilter, x: int, eta: float
) -> list[tuple[CanonicalElement, Fraction]]:
    """Weight 1/N(n) on admissible n with N(n) in [x, (1+eta)x]."""
    re, im, nm = rough_arrays(filt, x, eta)
    return [
        (canonicalize(GaussianInt(int(r), int(i))), Fraction(1, int(n)))
        for r, i, n in zip(re, im, nm)
    ]
