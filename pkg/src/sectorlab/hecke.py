"""Angular character sums: spectra, mean-value report cards, experiments.

The unitary character of order-m acts on a nonzero Gaussian integer n as
(n/|n|)^{4m}, i.e. exp(4im*arg n); it is trivial on units, so everything
is evaluated on canonical representatives.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .gaussian import (
    CanonicalElement,
    GaussianInt,
    SinSquaredBracket,
    arg_mod_quarter,
    canonicalize,
)
from .sectors import WeightedPointSet, _close_pairs
from .sieve import gaussian_prime_norms
from .weights import _first_quadrant_lattice

QUARTER = math.pi / 2

__all__ = [
    "HeckeCoefficientVector",
    "Spectrum",
    "SectorExclusion",
    "MvtReport",
    "lambda_power",
    "lambda_power_exact",
    "hecke_sum",
    "hecke_sum_exact",
    "hecke_spectrum",
    "primitive_ray_reduction",
    "fejer_majorant",
    "verify_fejer_minorant",
    "mvt_report",
    "large_value_count",
    "smooth_sum_experiment",
    "prime_sum_decay_experiment",
    "phase_derivative",
    "phase_derivative_root_angles",
    "save_spectrum",
    "load_spectrum",
]


class HeckeCoefficientVector:
    """Sparse map from canonical Gaussian integers to complex weights."""

    def __init__(self, entries: dict, norm_range: tuple[int, int]):
        lo, hi = norm_range
        self.entries: dict[tuple[int, int], complex] = {}
        for key, c in entries.items():
            if isinstance(key, CanonicalElement):
                re, im = key.value.re, key.value.im
            elif isinstance(key, GaussianInt):
                re, im = key.re, key.im
            else:
                re, im = key
            if not (re > 0 and im >= 0):
                raise ValueError(f"key {re}+{im}i is not canonical")
            n = re * re + im * im
            if not (lo <= n <= hi):
                raise ValueError(f"norm {n} outside declared range [{lo}, {hi}]")
            self.entries[(re, im)] = complex(c)
        self.norm_range = (lo, hi)
        self._arrays: Optional[tuple] = None

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(re, im, coeffs, angles), cached."""
        if self._arrays is None:
            keys = sorted(self.entries)
            re = np.array([k[0] for k in keys], dtype=np.int64)
            im = np.array([k[1] for k in keys], dtype=np.int64)
            cf = np.array([self.entries[k] for k in keys], dtype=np.complex128)
            ang = np.arctan2(im.astype(float), re.astype(float))
            self._arrays = (re, im, cf, ang)
        return self._arrays

    def abs_sum(self) -> float:
        return float(np.sum(np.abs(self.arrays()[2])))

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class Spectrum:
    m_lo: int
    m_hi: int
    values: np.ndarray
    method: str  # "direct" | "binned"
    bin_error_bound: float = 0.0
    _abs_sum: float = 0.0
    _bin_width: float = 0.0

    def __post_init__(self):
        if len(self.values) != self.m_hi - self.m_lo + 1:
            raise ValueError("value array length must match the m range")

    def value(self, m: int) -> complex:
        if not (self.m_lo <= m <= self.m_hi):
            raise IndexError(f"m={m} outside [{self.m_lo}, {self.m_hi}]")
        return complex(self.values[m - self.m_lo])

    def certificate(self, m: int) -> float:
        """Rigorous per-m deviation bound for the binned method.

        Lipschitz: |exp(4im a) - exp(4im a')| <= 4|m||a - a'| with
        |a - a'| <= binwidth/2 at bin centers, plus a round-off allowance.
        """
        if self.method != "binned":
            return 0.0
        return self._abs_sum * (4 * abs(m) * self._bin_width / 2 + 1e-11)


def lambda_power(n: GaussianInt, m: int) -> complex:
    """Unit complex value exp(4im * arg n) on the canonical associate."""
    theta = arg_mod_quarter(n)
    return complex(math.cos(4 * m * theta), math.sin(4 * m * theta))


def lambda_power_exact(n: GaussianInt, m: int) -> tuple[Fraction, Fraction]:
    """Exact rational (re, im) of the character value: n^{4m} / N(n)^{2m}."""
    c = canonicalize(n).value
    k = 4 * abs(m)
    zr, zi = 1, 0
    br, bi = c.re, c.im
    e = k
    while e:
        if e & 1:
            zr, zi = zr * br - zi * bi, zr * bi + zi * br
        br, bi = br * br - bi * bi, 2 * br * bi
        e >>= 1
    d = c.norm() ** (2 * abs(m))
    re, im = Fraction(zr, d), Fraction(zi, d)
    return (re, -im) if m < 0 else (re, im)


def hecke_sum(coeffs: HeckeCoefficientVector, m: int) -> complex:
    """Compensated evaluation of the order-m character sum."""
    _, _, cf, ang = coeffs.arrays()
    ph = 4 * m * ang
    re = math.fsum((cf.real * np.cos(ph) - cf.imag * np.sin(ph)).tolist())
    im = math.fsum((cf.real * np.sin(ph) + cf.imag * np.cos(ph)).tolist())
    return complex(re, im)


def hecke_sum_exact(
    coeffs: dict[tuple[int, int], tuple[Fraction, Fraction]], m: int
) -> tuple[Fraction, Fraction]:
    """Exact rational character sum for rational coefficient vectors."""
    tr, ti = Fraction(0), Fraction(0)
    for (re, im), (ar, ai) in coeffs.items():
        lr, li = lambda_power_exact(GaussianInt(re, im), m)
        tr += ar * lr - ai * li
        ti += ar * li + ai * lr
    return tr, ti


def _direct_values(ang, cf, m_lo, m_hi, chunk=256) -> np.ndarray:
    out = np.empty(m_hi - m_lo + 1, dtype=np.complex128)
    ms = np.arange(m_lo, m_hi + 1)
    for s in range(0, len(ms), chunk):
        mc = ms[s : s + chunk]
        ph = np.exp(1j * 4.0 * np.outer(mc, ang))
        out[s : s + len(mc)] = ph @ cf
    return out


def hecke_spectrum(
    coeffs: HeckeCoefficientVector,
    m_lo: int,
    m_hi: int,
    method: str = "direct",
    bins_log2: int = 22,
    target_error: Optional[float] = None,
) -> Spectrum:
    """Character-sum values for every m in [m_lo, m_hi].

    The binned method groups angles into 2^bins_log2 uniform cells of
    [0, pi/2) and evaluates on cell centers; its rigorous error certificate
    scales with the bin width and |m|.
    """
    if m_hi < m_lo:
        raise ValueError("empty m range")
    _, _, cf, ang = coeffs.arrays()
    if len(cf) == 0:
        return Spectrum(m_lo, m_hi, np.zeros(m_hi - m_lo + 1, np.complex128), method)
    if method == "direct":
        return Spectrum(m_lo, m_hi, _direct_values(ang, cf, m_lo, m_hi), "direct")
    if method != "binned":
        raise ValueError(f"unknown method {method!r}")
    width = QUARTER / (1 << bins_log2)
    abs_sum = float(np.sum(np.abs(cf)))
    worst_m = max(abs(m_lo), abs(m_hi))
    cert_worst = abs_sum * (4 * worst_m * width / 2 + 1e-11)
    if target_error is not None and cert_worst > target_error:
        needed = math.ceil(math.log2(QUARTER * 2 * worst_m * abs_sum / target_error))
        raise ValueError(
            f"binned certificate {cert_worst:.3e} exceeds target "
            f"{target_error:.3e}; use bins_log2 >= {needed}"
        )
    idx = np.minimum((ang / width).astype(np.int64), (1 << bins_log2) - 1)
    uniq, inv = np.unique(idx, return_inverse=True)
    binned = np.zeros(len(uniq), dtype=np.complex128)
    np.add.at(binned, inv, cf)
    centers = (uniq.astype(np.float64) + 0.5) * width
    spec = Spectrum(
        m_lo,
        m_hi,
        _direct_values(centers, binned, m_lo, m_hi),
        "binned",
        bin_error_bound=cert_worst,
        _abs_sum=abs_sum,
        _bin_width=width,
    )
    return spec


def primitive_ray_reduction(coeffs: HeckeCoefficientVector) -> HeckeCoefficientVector:
    """Re-attach each weight to the primitive element of its ray."""
    acc: dict[tuple[int, int], complex] = {}
    for (re, im), c in coeffs.entries.items():
        g = math.gcd(re, im)
        key = (re // g, im // g)
        acc[key] = acc.get(key, 0j) + c
    hi = max(coeffs.norm_range[1], 1)
    return HeckeCoefficientVector(acc, (1, hi))


def fejer_majorant(T: int, m: int) -> float:
    """Fourier coefficient of max(1 - 10T||x||, 0): nonnegative, and at
    least 0.96/(10T) on |m| <= T."""
    if T < 1:
        raise ValueError("T must be >= 1")
    if m == 0:
        return 1.0 / (10 * T)
    return 10 * T * (1 - math.cos(2 * math.pi * m / (10 * T))) / (2 * math.pi**2 * m * m)


def verify_fejer_minorant(T_max: int) -> tuple[bool, float]:
    """Check ghat(m) >= 0.96/(10T) for all |m| <= T, T = 1..T_max.

    Returns (all hold, worst ratio ghat(m)*10T/0.96 observed).
    """
    worst = math.inf
    for T in range(1, T_max + 1):
        m = np.arange(1, T + 1, dtype=np.float64)
        g = 10 * T * (1 - np.cos(2 * np.pi * m / (10 * T))) / (2 * np.pi**2 * m * m)
        r = float(np.min(g) * 10 * T / 0.96)
        worst = min(worst, r, 1.0 / (10 * T) * 10 * T / 0.96)
        if r < 1.0:
            return False, r
    return True, worst


@dataclass(frozen=True)
class MvtReport:
    lhs: float
    r1: float
    r2: float
    ratio_r1: float
    ratio_r2: float
    close_pair_count: int
    retries: int
    n_value: int
    T: int


def mvt_report(coeffs: HeckeCoefficientVector, T: int) -> MvtReport:
    """Exact inequality chain for the mean square of a character sum.

    lhs = sum over |m| <= T of |F(m)|^2;
    r1  = (N + T) * sum of |a'_n|^2 over primitive rays;
    r2  = (10T/0.96) * sum of |a_{n1} a_{n2}| over ordered pairs with
          wrapped angular separation <= (pi/2)/(10T).
    lhs <= r2 holds exactly for every coefficient vector once the Fejer
    minorant 0.96/(10T) is verified on |m| <= T.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    re, im, cf, ang = coeffs.arrays()
    spec = hecke_spectrum(coeffs, -T, T, method="direct")
    lhs = float(np.sum(np.abs(spec.values) ** 2))

    reduced = primitive_ray_reduction(coeffs)
    _, _, rcf, _ = reduced.arrays()
    N = coeffs.norm_range[1]
    r1 = (N + T) * float(np.sum(np.abs(rcf) ** 2))

    mag = np.abs(cf)
    pts = WeightedPointSet(re, im, mag, x=max(float(N), 2.0))
    bracket = SinSquaredBracket(Fraction(1, 20 * T), pi_multiple=True)
    pairs, retries = _close_pairs(pts, bracket)
    diag = float(np.sum(mag * mag))
    off = math.fsum(float(mag[i]) * float(mag[j]) for i, j in pairs)
    r2 = (10 * T / 0.96) * (diag + 2 * off)
    return MvtReport(
        lhs=lhs,
        r1=r1,
        r2=r2,
        ratio_r1=lhs / r1 if r1 > 0 else math.inf,
        ratio_r2=lhs / r2 if r2 > 0 else math.inf,
        close_pair_count=len(pairs),
        retries=retries,
        n_value=N,
        T=T,
    )


def large_value_count(coeffs: HeckeCoefficientVector, T: int, V: float) -> int:
    """Number of m in [-T, T] with |F(m)| >= V, from the direct spectrum."""
    spec = hecke_spectrum(coeffs, -T, T, method="direct")
    return int(np.sum(np.abs(spec.values) >= V))


@dataclass(frozen=True)
class SectorExclusion:
    """Union of closed angular intervals around given centers."""

    centers: tuple[float, ...]
    half_width: float

    def mask(self, angles: np.ndarray) -> np.ndarray:
        """True where an angle is inside an excluded interval."""
        if not self.centers or self.half_width <= 0:
            return np.zeros(len(angles), dtype=bool)
        c = np.asarray(self.centers)
        d = np.abs(angles[:, None] - c[None, :])
        return np.any(d <= self.half_width, axis=1)


def phase_derivative_root_angles(k_max: int, doubled: bool = False) -> list[float]:
    """Angles t in [0, pi/2] where Im((1 + i tan t)^k) = 0 for some k <= k_max.

    These are exactly t = j*pi/k; with doubled=True the analogous roots of
    the doubled-angle condition (t = j*pi/(2k)) are included as well.
    """
    fracs = set()
    for k in range(1, k_max + 1):
        for j in range(0, k // 2 + 1):
            f = Fraction(j, k)
            if f <= Fraction(1, 2):
                fracs.add(f)
        if doubled:
            for j in range(0, k + 1):
                f = Fraction(j, 2 * k)
                if f <= Fraction(1, 2):
                    fracs.add(f)
    return [float(f) * math.pi for f in sorted(fracs)]


def smooth_sum_experiment(
    N: int,
    N_prime: int,
    m_list: Sequence[int],
    pair_kappa_lambda: tuple[float, float],
    exclusion: Optional[SectorExclusion] = None,
) -> list[dict]:
    """Character sums over a norm annulus vs the two pointwise bound shapes.

    Per m: value = |sum of exp(4im arg n)| over N < N(n) <= N_prime, args
    outside the excluded sectors; ratios against |m|^kappa *
    N^((lambda-kappa+1)/2) and |m|^(1/3) * N^(1/2).
    """
    if not (N < N_prime <= 2 * N):
        raise ValueError("need N < N_prime <= 2N")
    if any(m == 0 for m in m_list):
        raise ValueError("m = 0 is excluded from bound experiments")
    kap, lam = pair_kappa_lambda
    re, im, nm = _first_quadrant_lattice(N + 1, N_prime)
    ang = np.arctan2(im.astype(float), re.astype(float))
    if exclusion is not None:
        keep = ~exclusion.mask(ang)
        ang = ang[keep]
    rows = []
    for m in m_list:
        z = np.exp(1j * 4.0 * m * ang)
        val = abs(complex(np.sum(z)))
        b1 = abs(m) ** kap * N ** ((lam - kap + 1) / 2)
        b2 = abs(m) ** (1 / 3) * math.sqrt(N)
        rows.append(
            {
                "m": m,
                "value_abs": val,
                "bound_pair": b1,
                "ratio_pair": val / b1,
                "bound_onethird": b2,
                "ratio_onethird": val / b2,
                "points": int(len(ang)),
            }
        )
    return rows


def prime_sum_decay_experiment(
    N_list: Sequence[int], m_list: Sequence[int]
) -> list[dict]:
    """|sum over N < N(p) <= 2N of lambda^m(p)/N(p)| against the decay
    target exp(-(log N)^(1/10))."""
    rows = []
    for N in N_list:
        primes = gaussian_prime_norms(N + 1, 2 * N)
        ang = np.arctan2(primes["im"].astype(float), primes["re"].astype(float))
        wts = 1.0 / primes["norm"].astype(float)
        target = math.exp(-((math.log(N)) ** (1 / 10)))
        for m in m_list:
            z = np.exp(1j * 4.0 * m * ang) * wts
            val = abs(complex(np.sum(z)))
            rows.append(
                {
                    "N": N,
                    "m": m,
                    "value_abs": val,
                    "target": target,
                    "ratio": val / target,
                    "primes": int(len(ang)),
                }
            )
    return rows


def phase_derivative(x: float, y: float, n: int) -> float:
    """n-th x-derivative of arctan(y/x):
    (-1)^n (n-1)! Im((x+iy)^n) / (x^2+y^2)^n."""
    if n < 1:
        raise ValueError("derivative order must be >= 1")
    if x == 0 and y == 0:
        raise ValueError("undefined at the origin")
    z = complex(x, y) ** n
    r2 = x * x + y * y
    return (-1) ** n * math.factorial(n - 1) * z.imag / r2**n


def save_spectrum(path: str | Path, spec: Spectrum) -> None:
    """Dump format: one JSON header line, then raw (float64 re, float64 im)."""
    header = {
        "m_lo": spec.m_lo,
        "m_hi": spec.m_hi,
        "method": spec.method,
        "bin_error_bound": spec.bin_error_bound,
        "count": len(spec.values),
    }
    data = np.empty((len(spec.values), 2), dtype="<f8")
    data[:, 0] = spec.values.real
    data[:, 1] = spec.values.imag
    with open(path, "wb") as fh:
        fh.write(json.dumps(header, sort_keys=True).encode() + b"\n")
        fh.write(data.tobytes())


def load_spectrum(path: str | Path) -> Spectrum:
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode())
        raw = np.frombuffer(fh.read(), dtype="<f8").reshape(-1, 2)
    values = raw[:, 0] + 1j * raw[:, 1]
    return Spectrum(
        header["m_lo"],
        header["m_hi"],
        values,
        header["method"],
        bin_error_bound=header["bin_error_bound"],
    )
