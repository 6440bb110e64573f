"""Segmented sieving of Gaussian primes by norm.

A first-quadrant Gaussian prime has norm 2 (the ramified 1+i), norm q for a
rational prime q = 1 (mod 4) (two conjugate-distinct primes), or norm q^2
for a rational prime q = 3 (mod 4) (the inert q itself). Sieving by norm is
therefore a rational-prime sieve plus per-prime splitting.
"""

from __future__ import annotations

import math
import struct
from pathlib import Path

import mpmath
import numpy as np

from .gaussian import (
    CanonicalElement,
    GaussianInt,
    gaussian_gcd,
    sqrt_minus_one_mod_prime,
)

MAX_SIEVE_NORM = (1 << 63) - 1

CACHE_MAGIC = b"GPRIMES1"

__all__ = [
    "rational_primes_upto",
    "gaussian_primes_by_norm",
    "gaussian_prime_norms",
    "brute_force_gaussian_primes",
    "prime_ideal_count_estimate",
    "write_prime_cache",
    "read_prime_cache",
]


def rational_primes_upto(n: int) -> np.ndarray:
    """All rational primes <= n, as an int64 array."""
    if n < 2:
        return np.array([], dtype=np.int64)
    mask = np.ones(n + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.flatnonzero(mask).astype(np.int64)


def _rational_primes_in(lo: int, hi: int, segment: int = 1 << 22):
    """Yield int64 arrays of primes in [lo, hi], segmented."""
    lo = max(lo, 2)
    if hi < lo:
        return
    base = rational_primes_upto(math.isqrt(hi))
    start = lo
    while start <= hi:
        end = min(start + segment - 1, hi)
        mask = np.ones(end - start + 1, dtype=bool)
        if start <= 1:
            mask[: max(0, 2 - start)] = False
        for p in base:
            p = int(p)
            first = max(p * p, ((start + p - 1) // p) * p)
            if first > end:
                continue
            mask[first - start :: p] = False
        if start <= 2 <= end:
            mask[2 - start] = True
        seg = np.flatnonzero(mask).astype(np.int64) + start
        seg = seg[seg >= 2]
        yield seg
        start = end + 1


def _split_coordinates(q: int) -> tuple[int, int]:
    """(a, b) with a > b >= 1 and a^2 + b^2 = q, for prime q = 1 (mod 4)."""
    t = sqrt_minus_one_mod_prime(q)
    g = gaussian_gcd(GaussianInt(q, 0), GaussianInt(t, 1))
    a, b = abs(g.re), abs(g.im)
    return max(a, b), min(a, b)


def gaussian_prime_norms(lo: int, hi: int) -> np.ndarray:
    """Structured array (norm, re, im) of canonical Gaussian primes with
    norm in [lo, hi], sorted by norm (re descending within a split pair)."""
    if not (2 <= lo <= hi):
        raise ValueError("need 2 <= lo <= hi")
    if hi > MAX_SIEVE_NORM:
        raise ValueError(f"norm bound {hi} exceeds the overflow-safe range 2^63-1")
    rows: list[tuple[int, int, int]] = []
    if lo <= 2 <= hi:
        rows.append((2, 1, 1))
    for seg in _rational_primes_in(lo, hi):
        for q in seg[seg % 4 == 1]:
            q = int(q)
            a, b = _split_coordinates(q)
            rows.append((q, a, b))
            rows.append((q, b, a))
    for seg in _rational_primes_in(max(2, math.isqrt(lo - 1) + 1), math.isqrt(hi)):
        for q in seg[seg % 4 == 3]:
            q = int(q)
            if lo <= q * q <= hi:
                rows.append((q * q, q, 0))
    arr = np.array(
        rows, dtype=[("norm", np.int64), ("re", np.int64), ("im", np.int64)]
    )
    arr.sort(order=["norm", "im"])
    return arr


def gaussian_primes_by_norm(lo: int, hi: int) -> list[CanonicalElement]:
    """All first-quadrant Gaussian primes with norm in [lo, hi], each once."""
    arr = gaussian_prime_norms(lo, hi)
    return [
        CanonicalElement(GaussianInt(int(r), int(i)), 0)
        for r, i in zip(arr["re"], arr["im"])
    ]


def brute_force_gaussian_primes(bound: int) -> np.ndarray:
    """Oracle: structured (norm, re, im) by direct norm-primality testing."""
    mask = np.ones(bound + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(bound) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    rows = []
    amax = math.isqrt(bound)
    for a in range(1, amax + 1):
        bmax = math.isqrt(bound - a * a)
        b = np.arange(0, bmax + 1, dtype=np.int64)
        n = a * a + b * b
        ok = n >= 2
        ok &= mask[n]
        for bb, nn in zip(b[ok], n[ok]):
            rows.append((int(nn), a, int(bb)))
        # inert: b == 0 and a a rational prime = 3 (mod 4), norm a^2
        if a % 4 == 3 and a <= len(mask) - 1 and mask[a] and a * a <= bound:
            rows.append((a * a, a, 0))
    arr = np.array(
        rows, dtype=[("norm", np.int64), ("re", np.int64), ("im", np.int64)]
    )
    arr.sort(order=["norm", "im"])
    return arr


def prime_ideal_count_estimate(x: float) -> float:
    """Logarithmic-integral estimate for the number of prime ideals of
    norm <= x in Z[i]."""
    return float(mpmath.li(x))


def write_prime_cache(path: str | Path, lo: int, hi: int, arr: np.ndarray) -> None:
    """Persist sieve output: magic, lo, hi, then (re, im) int64 LE records."""
    path = Path(path)
    payload = np.empty((len(arr), 2), dtype="<i8")
    payload[:, 0] = arr["re"]
    payload[:, 1] = arr["im"]
    with open(path, "wb") as fh:
        fh.write(CACHE_MAGIC)
        fh.write(struct.pack("<qq", lo, hi))
        fh.write(payload.tobytes())


def read_prime_cache(path: str | Path) -> tuple[int, int, np.ndarray]:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != CACHE_MAGIC:
            raise ValueError(f"bad cache magic {magic!r}")
        lo, hi = struct.unpack("<qq", fh.read(16))
        raw = np.frombuffer(fh.read(), dtype="<i8").reshape(-1, 2)
    arr = np.empty(len(raw), dtype=[("norm", np.int64), ("re", np.int64), ("im", np.int64)])
    arr["re"] = raw[:, 0]
    arr["im"] = raw[:, 1]
    arr["norm"] = raw[:, 0] ** 2 + raw[:, 1] ** 2
    return lo, hi, arr
