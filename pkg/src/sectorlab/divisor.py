"""Additive divisor correlations in progressions, verified end to end.

The left side counts quadruples m1*m2 - m3*m4 = k weighted by four smooth
bumps, subject to T1 | m1^2+m3^2 and T2 | m2^2+m4^2 (T1, T2 square-free,
coprime to k). The main term is a product-of-two-Dirichlet-convolutions
integral times a singular series with explicit local factors. The exact
left side is computed by eliminating m2: for each pair of square roots of
-1 modulo T1 and T2, m3 runs over a progression and m4 over an explicit
residue class modulo T2*m1/g.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .gaussian import _factor_int, is_prime

__all__ = [
    "SmoothWeight",
    "DivisorInstance",
    "EliminationClass",
    "SingularSeriesValue",
    "local_factor_f",
    "local_factor_g",
    "sqrt_minus_one_mod_squarefree",
    "singular_series",
    "main_term",
    "MainTermResult",
    "correlation_sum_exact",
    "CorrelationResult",
    "naive_correlation_sum",
    "kloosterman_sum",
    "weil_check",
    "weil_scan",
    "divisor_count",
    "parse_instance_file",
    "write_instance_file",
]


# ---------------------------------------------------------------------------
# smooth plateau weights


def _mollifier_step(t: np.ndarray) -> np.ndarray:
    """C-infinity step: 0 for t<=0, 1 for t>=1, built from exp(-1/t)."""
    t = np.asarray(t, dtype=np.float64)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        f = np.where(t > 0, np.exp(-1.0 / np.maximum(t, 1e-300)), 0.0)
        g = np.where(1 - t > 0, np.exp(-1.0 / np.maximum(1 - t, 1e-300)), 0.0)
    return f / (f + g)


@dataclass
class SmoothWeight:
    """Plateau bump supported on [M, 2M], flat on [plateau_lo*M, plateau_hi*M].

    Values in [0, 1]; the h-th derivative scales like M^{-h}, and the
    measured constants sup |b^(h)| * M^h (h <= 6, sampled on a dense grid)
    are recorded on first access.
    """

    M: float
    plateau_lo: float = 1.1
    plateau_hi: float = 1.9
    _derivative_constants: Optional[list[float]] = field(default=None, repr=False)

    def __post_init__(self):
        if self.M <= 0:
            raise ValueError("M must be positive")
        if not (1.0 < self.plateau_lo < self.plateau_hi < 2.0):
            raise ValueError("plateau must sit strictly inside (M, 2M)")

    @property
    def support(self) -> tuple[float, float]:
        return (self.M, 2 * self.M)

    def __call__(self, s):
        s = np.asarray(s, dtype=np.float64)
        lo_ramp = (s - self.M) / ((self.plateau_lo - 1.0) * self.M)
        hi_ramp = (2 * self.M - s) / ((2.0 - self.plateau_hi) * self.M)
        val = _mollifier_step(lo_ramp) * _mollifier_step(hi_ramp)
        return val if val.shape else float(val)

    def support_integers(self) -> np.ndarray:
        return np.arange(math.ceil(self.M), math.floor(2 * self.M) + 1, dtype=np.int64)

    def derivative_constants(self, max_order: int = 6, grid: int = 10_000) -> list[float]:
        """Measured sup |b^(h)(t)| * M^h for h = 0..max_order."""
        if self._derivative_constants is None:
            s = np.linspace(self.M, 2 * self.M, grid)
            vals = self(s)
            consts = [float(np.max(np.abs(vals)))]
            h = s[1] - s[0]
            d = vals
            for order in range(1, max_order + 1):
                d = np.gradient(d, h)
                consts.append(float(np.max(np.abs(d)) * self.M**order))
            self._derivative_constants = consts
        return self._derivative_constants


# ---------------------------------------------------------------------------
# instance


@dataclass
class DivisorInstance:
    x: int
    k: int
    T1: int
    T2: int
    weights: tuple[SmoothWeight, SmoothWeight, SmoothWeight, SmoothWeight]
    delta: float = 0.25

    def __post_init__(self):
        if self.x < 10:
            raise ValueError("x too small")
        if self.k == 0:
            raise ValueError("k must be nonzero")
        for name, T in (("T1", self.T1), ("T2", self.T2)):
            if T < 1:
                raise ValueError(f"{name} must be positive")
            if any(e > 1 for e in _factor_int(T).values()):
                raise ValueError(f"{name} = {T} is not square-free")
        if math.gcd(self.k, self.T1 * self.T2) != 1:
            raise ValueError(
                "gcd(k, T1*T2) must be 1; other configurations are outside the "
                "supported hypotheses"
            )
        bound = self.x**self.delta
        if max(abs(self.k), self.T1, self.T2) > bound:
            raise ValueError(f"|k|, T1, T2 must be <= x^delta = {bound:.1f}")
        for w in self.weights:
            if not (self.x ** (1 - self.delta) <= w.M <= 100 * self.x):
                raise ValueError("weight scales must lie in [x^(1-delta), 100x]")

    @classmethod
    def symmetric(cls, x: int, k: int, T1: int, T2: int, delta: float = 0.25):
        """All four weights centered at M = x."""
        w = tuple(SmoothWeight(float(x)) for _ in range(4))
        return cls(x, k, T1, T2, w, delta)


@dataclass(frozen=True)
class EliminationClass:
    """Residue class m4 = residue (mod modulus), modulus = T2*m1/g."""

    residue: int
    modulus: int


# ---------------------------------------------------------------------------
# local factors and the singular series


def local_factor_f(p: int, k: int, T1: int, T2: int) -> Fraction:
    """Local density correction at p (depends only on v_p of k, T1, T2).

    p | k (then p coprime to T1*T2): (p^(v+1) - 1)/(p^v (p-1)) with
    v = v_p(k). p | T1*T2 (then p coprime to k): p/(p+1) times the number
    of admissible root combinations: 1 root for p = 2, 2 for p = 1 (mod 4),
    0 for p = 3 (mod 4) when p divides exactly one of T1, T2; distinct
    ordered root pairs (2 for p = 1 (mod 4), else 0) when p divides both.
    Symmetric in (T1, T2).
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    for name, T in (("T1", T1), ("T2", T2)):
        if T % (p * p) == 0:
            raise ValueError(f"p^2 | {name}: outside proposition hypotheses")
    v = 0
    kk = abs(k)
    while kk % p == 0:
        v += 1
        kk //= p
    divides_t = (T1 % p == 0) + (T2 % p == 0)
    if v > 0 and divides_t:
        raise ValueError("p | k together with p | T1*T2: outside hypotheses")
    if v > 0:
        return Fraction(p ** (v + 1) - 1, p**v * (p - 1))
    if divides_t == 0:
        return Fraction(1)
    if divides_t == 1:
        roots = 1 if p == 2 else (2 if p % 4 == 1 else 0)
    else:
        roots = 2 if p % 4 == 1 else 0
    return Fraction(p, p + 1) * roots


def local_factor_g(p: int, k: int, D: int) -> Fraction:
    """Moebius-inverted combination of local factors over divisors of (D, p):
    sum over m1 n1 | (D,p), m2 n2 | (D,p) with (D,p) | m1 m2 of
    mu(n1) mu(n2) f_p(k, m1 n1, m2 n2)/(m1 n1 m2 n2)."""
    if any(e > 1 for e in _factor_int(D).values()):
        raise ValueError("D must be square-free")
    dp = p if D % p == 0 else 1
    parts = [(1, 1), (dp, 1), (1, dp)] if dp > 1 else [(1, 1)]
    total = Fraction(0)
    for m1, n1 in parts:
        for m2, n2 in parts:
            if (m1 * m2) % dp != 0:
                continue
            mu = (-1 if n1 > 1 else 1) * (-1 if n2 > 1 else 1)
            total += (
                Fraction(mu, m1 * n1 * m2 * n2)
                * local_factor_f(p, k, m1 * n1, m2 * n2)
            )
    return total


def sqrt_minus_one_mod_squarefree(T: int) -> list[int]:
    """All residues t (mod T) with t^2 = -1, for square-free positive T.

    Empty when some p | T has p = 3 (mod 4); T = 1 yields [0].
    """
    if T < 1:
        raise ValueError("T must be positive")
    if any(e > 1 for e in _factor_int(T).values()):
        raise ValueError(f"{T} is not square-free")
    residues = [0]
    modulus = 1
    for p in sorted(_factor_int(T)):
        if p == 2:
            proots = [1]
        elif p % 4 == 1:
            from .gaussian import sqrt_minus_one_mod_prime

            t = sqrt_minus_one_mod_prime(p)
            proots = [t, p - t]
        else:
            return []
        new = []
        inv_mod = pow(modulus, -1, p) if modulus % p else None
        for r in residues:
            for s in proots:
                # CRT combine r (mod modulus) with s (mod p)
                t = (r + modulus * ((s - r) * inv_mod % p)) if inv_mod is not None else s
                new.append(t % (modulus * p))
        residues = new
        modulus *= p
    return sorted(residues)


@dataclass(frozen=True)
class SingularSeriesValue:
    value: float
    rational_part: Fraction  # value = rational_part * 6/pi^2
    local_factors: tuple[tuple[int, Fraction], ...]
    frame: str = "6/(T1*T2*pi^2)"


def singular_series(k: int, T1: int, T2: int) -> SingularSeriesValue:
    """6/(T1 T2 pi^2) times the product of local factors over p | k*T1*T2.

    Internally cross-checked against the root-pair route: summing
    1_{(T1,T2,t1-t2)=1} over root pairs, times sum_{g|k} 1/g, times
    prod_{p | T1 T2} p/(p+1); the two must agree exactly.
    """
    if k == 0:
        raise ValueError("k must be nonzero")
    if math.gcd(k, T1 * T2) != 1:
        raise ValueError("gcd(k, T1*T2) must be 1")
    for T in (T1, T2):
        if any(e > 1 for e in _factor_int(T).values()):
            raise ValueError("T1, T2 must be square-free")
    primes = sorted(set(_factor_int(abs(k))) | set(_factor_int(T1)) | set(_factor_int(T2)))
    factors = [(p, local_factor_f(p, k, T1, T2)) for p in primes]
    rational = Fraction(1, T1 * T2)
    for _, f in factors:
        rational *= f

    # independent route: explicit sum over root pairs
    roots1 = sqrt_minus_one_mod_squarefree(T1)
    roots2 = sqrt_minus_one_mod_squarefree(T2)
    g12 = math.gcd(T1, T2)
    pair_count = sum(
        1
        for t1 in roots1
        for t2 in roots2
        if math.gcd(g12, abs(t1 - t2)) == 1
    )
    gsum = sum((Fraction(1, d) for d in _divisors(abs(k))), Fraction(0))
    t_route = Fraction(pair_count, T1 * T2) * gsum
    for p in set(_factor_int(T1)) | set(_factor_int(T2)):
        t_route *= Fraction(p, p + 1)
    if t_route != rational:
        raise AssertionError(
            f"singular series routes disagree: {rational} vs {t_route} "
            f"for (k, T1, T2) = ({k}, {T1}, {T2})"
        )
    return SingularSeriesValue(
        value=float(rational) * 6 / math.pi**2,
        rational_part=rational,
        local_factors=tuple(factors),
    )


def _divisors(n: int) -> list[int]:
    ds = [1]
    for p, e in _factor_int(n).items():
        ds = [d * p**j for d in ds for j in range(e + 1)]
    return sorted(ds)


def divisor_count(n: int) -> int:
    return math.prod(e + 1 for e in _factor_int(n).values())


# ---------------------------------------------------------------------------
# main term quadrature


@dataclass(frozen=True)
class MainTermResult:
    value: float
    quadrature_error: float
    integral: float
    singular: SingularSeriesValue
    disjoint_supports: bool = False


def _inner_on_grid(ba: SmoothWeight, bb: SmoothWeight, t: np.ndarray, nodes: int) -> np.ndarray:
    """H(t) = integral of ba(s) bb(t/s) ds/s, Simpson in log s, per t."""
    lo = np.maximum(ba.support[0], t / bb.support[1])
    hi = np.minimum(ba.support[1], t / bb.support[0])
    bad = lo >= hi
    lo = np.where(bad, 1.0, lo)
    hi = np.where(bad, 2.0, hi)
    u = np.linspace(0.0, 1.0, nodes)[None, :]
    ulo, uhi = np.log(lo)[:, None], np.log(hi)[:, None]
    uu = ulo + (uhi - ulo) * u
    s = np.exp(uu)
    integrand = ba(s) * bb(t[:, None] / s)
    w = np.ones(nodes)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    h = (uhi[:, 0] - ulo[:, 0]) / (nodes - 1)
    vals = (integrand * w[None, :]).sum(axis=1) * h / 3.0
    return np.where(bad, 0.0, vals)


def _outer_integral(inst: DivisorInstance, nodes: int) -> float:
    b1, b2, b3, b4 = inst.weights
    lo = max(b1.support[0] * b2.support[0], b3.support[0] * b4.support[0])
    hi = min(b1.support[1] * b2.support[1], b3.support[1] * b4.support[1])
    if lo >= hi:
        return 0.0
    inner_nodes = min(nodes, 4097)
    v = np.linspace(math.log(lo), math.log(hi), nodes)
    t = np.exp(v)
    h12 = _inner_on_grid(b1, b2, t, nodes=inner_nodes)
    h34 = _inner_on_grid(b3, b4, t, nodes=inner_nodes)
    integrand = h12 * h34 * t  # dt = t dv
    w = np.ones(nodes)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    h = (v[-1] - v[0]) / (nodes - 1)
    return float((integrand * w).sum() * h / 3.0)


def main_term(inst: DivisorInstance, rel_target: float = 1e-8) -> MainTermResult:
    """Singular series times the double convolution integral, with a
    refinement-based quadrature error estimate at the 1e-8 relative target."""
    sing = singular_series(inst.k, inst.T1, inst.T2)
    b1, b2, b3, b4 = inst.weights
    lo = max(b1.support[0] * b2.support[0], b3.support[0] * b4.support[0])
    hi = min(b1.support[1] * b2.support[1], b3.support[1] * b4.support[1])
    if lo >= hi:
        return MainTermResult(0.0, 0.0, 0.0, sing, disjoint_supports=True)
    if sing.value == 0.0:
        return MainTermResult(0.0, 0.0, _outer_integral(inst, 2049), sing)
    nodes = 1025
    prev = _outer_integral(inst, nodes)
    while True:
        nodes = 2 * (nodes - 1) + 1
        cur = _outer_integral(inst, nodes)
        err = abs(cur - prev)
        if err <= rel_target * abs(cur) or nodes > 100_000:
            break
        prev = cur
    return MainTermResult(cur * sing.value, err * abs(sing.value), cur, sing)


# ---------------------------------------------------------------------------
# exact left side via the elimination walk


@dataclass(frozen=True)
class CorrelationResult:
    value: float
    term_count: int
    root_pairs: int
    work_estimate: int


def _euler_phi_table(n: int) -> np.ndarray:
    phi = np.arange(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if phi[p] == p:  # prime
            phi[p::p] -= phi[p::p] // p
    return phi


def _modpow_vec(base: np.ndarray, exp: int, mod: int) -> np.ndarray:
    """Vector base^exp mod `mod` by square-and-multiply; needs mod < 2^31."""
    if mod >= 1 << 31:
        raise ValueError("modulus too large for int64 square-and-multiply")
    result = np.ones_like(base)
    b = base % mod
    e = exp
    while e:
        if e & 1:
            result = (result * b) % mod
        b = (b * b) % mod
        e >>= 1
    return result


def _term(b1v, b2v, b3v, b4v):
    # fixed multiplication order so both enumeration routes produce
    # bitwise-identical term values
    return ((b1v * b2v) * b3v) * b4v


def correlation_sum_exact(
    inst: DivisorInstance,
    summation: str = "fast",
    threads: Optional[int] = None,
    work_limit: int = 2_000_000_000,
) -> CorrelationResult:
    """Exact weighted solution count of m1 m2 - m3 m4 = k with the two
    norm-divisibility conditions, via per-root-pair elimination of m2.

    For each root pair (t1, t2): m1 runs over the support of b1, m3 over
    the progression t1*m1 (mod T1); with g = gcd(t2*m1 - m3, T2*m1) and
    g | k, m4 walks the class R (mod T2*m1/g) and m2 = (m3 m4 + k)/m1 is
    integral automatically. summation="fsum" reduces all terms with
    correctly-rounded summation (order-independent, used for exact-equality
    comparisons); "fast" uses numpy pairwise summation.
    """
    k, T1, T2 = inst.k, inst.T1, inst.T2
    b1, b2, b3, b4 = inst.weights
    roots1 = sqrt_minus_one_mod_squarefree(T1)
    roots2 = sqrt_minus_one_mod_squarefree(T2)
    m1s = b1.support_integers()
    m3_count = len(b3.support_integers()) // max(T1, 1) + 1
    work = len(roots1) * len(roots2) * len(m1s) * m3_count
    if work > work_limit:
        raise ValueError(
            f"instance too large: estimated {work:.2e} inner iterations "
            f"exceed the limit {work_limit:.2e}"
        )
    if not roots1 or not roots2:
        return CorrelationResult(0.0, 0, 0, work)

    lo3 = math.ceil(b3.support[0])
    hi3 = math.floor(b3.support[1])
    lo4 = math.ceil(b4.support[0])
    hi4 = math.floor(b4.support[1])
    phi = _euler_phi_table(T2 * int(m1s[-1]))
    b1_vals = b1(m1s.astype(np.float64))

    def stratum(t1t2: tuple[int, int]):
        t1, t2 = t1t2
        terms: list[np.ndarray] = []
        partials: list[float] = []
        for mi, m1 in enumerate(m1s):
            w1 = b1_vals[mi]
            if w1 == 0.0:
                continue
            m1 = int(m1)
            first3 = lo3 + ((t1 * m1 - lo3) % T1)
            if first3 > hi3:
                continue
            m3 = np.arange(first3, hi3 + 1, T1, dtype=np.int64)
            u = t2 * m1 - m3
            G = np.gcd(np.abs(u), T2 * m1)
            ok = (k % G) == 0
            if not np.any(ok):
                continue
            m3, u, G = m3[ok], u[ok], G[ok]
            for g in np.unique(G):
                g = int(g)
                sel = G == g
                m3g, ug = m3[sel], u[sel]
                Mg = T2 * m1 // g
                if Mg == 1:
                    R = np.zeros(len(m3g), dtype=np.int64)
                else:
                    up = (ug // g) % Mg
                    inv = _modpow_vec(up, int(phi[Mg]) - 1, Mg)
                    R = ((k // g) % Mg) * inv % Mg
                first4 = R + ((lo4 - R + Mg - 1) // Mg) * Mg
                t_steps = 0 if len(first4) == 0 else int(max(0, (hi4 - int(first4.min())) // Mg + 1))
                for step in range(t_steps):
                    m4 = first4 + step * Mg
                    valid = m4 <= hi4
                    if not np.any(valid):
                        break
                    m4v = m4[valid]
                    m3v = m3g[valid]
                    m2v = (m3v * m4v + k) // m1
                    pos = m2v >= 1
                    if not np.any(pos):
                        continue
                    m2v, m3v, m4v = m2v[pos], m3v[pos], m4v[pos]
                    tv = _term(
                        w1,
                        b2(m2v.astype(np.float64)),
                        b3(m3v.astype(np.float64)),
                        b4(m4v.astype(np.float64)),
                    )
                    tv = tv[tv != 0.0]
                    if len(tv):
                        terms.append(tv)
            if summation == "fast" and terms:
                partials.append(float(np.sum(np.concatenate(terms))))
                terms = []
        return partials, terms

    strata = [(t1, t2) for t1 in roots1 for t2 in roots2]
    results = []
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(stratum, strata))
    else:
        results = [stratum(s) for s in strata]

    term_count = 0
    if summation == "fsum":
        all_terms: list[np.ndarray] = []
        for partials, terms in results:
            assert not partials
            all_terms.extend(terms)
        flat = np.concatenate(all_terms) if all_terms else np.zeros(0)
        term_count = len(flat)
        value = math.fsum(flat.tolist())
    elif summation == "fast":
        parts: list[float] = []
        for partials, terms in results:
            parts.extend(partials)
            if terms:
                parts.append(float(np.sum(np.concatenate(terms))))
        value = math.fsum(parts)
        term_count = -1
    else:
        raise ValueError("summation must be 'fsum' or 'fast'")
    return CorrelationResult(value, term_count, len(strata), work)


def naive_correlation_sum(inst: DivisorInstance) -> CorrelationResult:
    """Brute-force quadruple sum (m3 looped, m4 solved by division); the
    independent oracle for the elimination walk. Correctly-rounded reduction."""
    k, T1, T2 = inst.k, inst.T1, inst.T2
    b1, b2, b3, b4 = inst.weights
    m1 = b1.support_integers()
    m2 = b2.support_integers()
    n = np.outer(m1, m2) - k  # = m3*m4 for solutions
    b12 = np.outer(b1(m1.astype(float)), b2(m2.astype(float)))
    cond1_base = np.outer(m1 * m1, np.ones(len(m2), dtype=np.int64))
    m2sq = (m2 * m2)[None, :]
    all_terms = []
    for m3 in b3.support_integers():
        m3 = int(m3)
        w3 = float(b3(float(m3)))
        q, r = np.divmod(n, m3)
        mask = (r == 0) & (q >= math.ceil(b4.support[0])) & (q <= math.floor(b4.support[1]))
        if T1 > 1:
            mask &= (cond1_base + m3 * m3) % T1 == 0
        if T2 > 1:
            mask &= (m2sq + q * q) % T2 == 0
        if not np.any(mask):
            continue
        tv = _term(b12[mask], np.float64(w3), b4(q[mask].astype(float)), np.float64(1.0))
        tv = tv[tv != 0.0]
        if len(tv):
            all_terms.append(tv)
    flat = np.concatenate(all_terms) if all_terms else np.zeros(0)
    return CorrelationResult(math.fsum(flat.tolist()), len(flat), -1, len(m1) * len(m2) * len(b3.support_integers()))


# ---------------------------------------------------------------------------
# Kloosterman sums


def _units_and_inverses(c: int) -> tuple[np.ndarray, np.ndarray]:
    """Units modulo c (c >= 2) and their inverses, via x^(phi(c)-1)."""
    x = np.arange(1, c, dtype=np.int64)
    x = x[np.gcd(x, c) == 1]
    xbar = _modpow_vec(x, _euler_phi_int(c) - 1, c)
    return x, xbar


def _euler_phi_int(c: int) -> int:
    phi = c
    for p in _factor_int(c):
        phi -= phi // p
    return phi


def kloosterman_sum(a: int, b: int, c: int) -> complex:
    """S(a,b;c) = sum over x (mod c), (x,c)=1 of e((a x + b xbar)/c)."""
    if c < 1:
        raise ValueError("c must be >= 1")
    if c == 1:
        return complex(1.0, 0.0)
    x, xbar = _units_and_inverses(c)
    idx = (a * x + b * xbar) % c
    ang = 2 * math.pi * idx.astype(np.float64) / c
    return complex(math.fsum(np.cos(ang).tolist()), math.fsum(np.sin(ang).tolist()))


def weil_check(a: int, b: int, c: int) -> bool:
    """|S(a,b;c)| <= tau(c) * gcd(a,b,c)^(1/2) * c^(1/2), with fp cushion."""
    s = abs(kloosterman_sum(a, b, c))
    g = math.gcd(math.gcd(abs(a), abs(b)), c)
    bound = divisor_count(c) * math.sqrt(g) * math.sqrt(c)
    return s <= bound + 1e-9 * max(1.0, bound)


def weil_scan(c_max: int, ab_max: int) -> tuple[bool, float]:
    """Check the Weil bound for all 1 <= c <= c_max, 0 <= a, b <= ab_max.

    Returns (all pass, worst |S|/bound ratio).
    """
    worst = 0.0
    ab = np.arange(0, ab_max + 1, dtype=np.int64)
    for c in range(1, c_max + 1):
        if c == 1:
            worst = max(worst, 1.0)
            continue
        x, xbar = _units_and_inverses(c)
        cos_t = np.cos(2 * np.pi * np.arange(c) / c)
        sin_t = np.sin(2 * np.pi * np.arange(c) / c)
        ax = (ab[:, None] * x[None, :]) % c
        bx = (ab[:, None] * xbar[None, :]) % c
        idx = (ax[:, None, :] + bx[None, :, :]) % c
        s_re = cos_t[idx].sum(axis=2)
        s_im = sin_t[idx].sum(axis=2)
        s_abs = np.hypot(s_re, s_im)
        g = np.gcd(np.gcd.outer(ab, ab), c).astype(np.float64)
        bound = divisor_count(c) * np.sqrt(g) * math.sqrt(c)
        ratio = s_abs / bound
        worst = max(worst, float(ratio.max()))
        if worst > 1.0 + 1e-9:
            return False, worst
    return True, worst


# ---------------------------------------------------------------------------
# instance files (plain-text key-value)


def write_instance_file(path: str | Path, inst: DivisorInstance) -> None:
    lines = [
        f"x = {inst.x}",
        f"k = {inst.k}",
        f"T1 = {inst.T1}",
        f"T2 = {inst.T2}",
        f"delta = {inst.delta}",
    ]
    for i, w in enumerate(inst.weights, start=1):
        lines.append(f"M{i} = {w.M}")
    lines.append(f"plateau_lo = {inst.weights[0].plateau_lo}")
    lines.append(f"plateau_hi = {inst.weights[0].plateau_hi}")
    Path(path).write_text("\n".join(lines) + "\n")


def parse_instance_file(path: str | Path) -> DivisorInstance:
    kv: dict[str, str] = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, val = line.partition("=")
        kv[key.strip()] = val.strip()
    required = {"x", "k", "T1", "T2", "M1", "M2", "M3", "M4"}
    missing = required - kv.keys()
    if missing:
        raise ValueError(f"instance file missing keys: {sorted(missing)}")
    plo = float(kv.get("plateau_lo", 1.1))
    phi_ = float(kv.get("plateau_hi", 1.9))
    weights = tuple(
        SmoothWeight(float(kv[f"M{i}"]), plo, phi_) for i in range(1, 5)
    )
    return DivisorInstance(
        x=int(kv["x"]),
        k=int(kv["k"]),
        T1=int(kv["T1"]),
        T2=int(kv["T2"]),
        weights=weights,  # type: ignore[arg-type]
        delta=float(kv.get("delta", 0.25)),
    )
