"""Exact-rational calculus of van der Corput exponent pairs.

Pairs live in {0 <= kappa <= 1/2 <= lambda <= 1} and are generated from
the trivial pair (0, 1) by the A and B processes; process words apply
rightmost letter first.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

DENOMINATOR_LIMIT = 1 << 64

__all__ = [
    "ExactPair",
    "InadmissiblePair",
    "a_process",
    "b_process",
    "apply_word",
    "search_optimal",
]


class InadmissiblePair(ValueError):
    """A B-step was attempted where kappa + 2*lambda < 3/2."""


@dataclass(frozen=True)
class ExactPair:
    kappa: Fraction
    lam: Fraction

    def __post_init__(self):
        k, l = Fraction(self.kappa), Fraction(self.lam)
        object.__setattr__(self, "kappa", k)
        object.__setattr__(self, "lam", l)
        if not (0 <= k <= Fraction(1, 2) <= l <= 1):
            raise ValueError(f"({k}, {l}) violates 0 <= kappa <= 1/2 <= lambda <= 1")
        if k.denominator > DENOMINATOR_LIMIT or l.denominator > DENOMINATOR_LIMIT:
            raise ValueError("denominator exceeds 2^64")

    def as_floats(self) -> tuple[float, float]:
        return float(self.kappa), float(self.lam)

    def __str__(self) -> str:
        return f"({self.kappa}, {self.lam})"


TRIVIAL_PAIR = ExactPair(Fraction(0), Fraction(1))


def a_process(p: ExactPair) -> ExactPair:
    """(kappa, lambda) -> (kappa/(2kappa+2), 1/2 + lambda/(2kappa+2))."""
    d = 2 * p.kappa + 2
    return ExactPair(p.kappa / d, Fraction(1, 2) + p.lam / d)


def b_process(p: ExactPair) -> ExactPair:
    """(kappa, lambda) -> (lambda - 1/2, kappa + 1/2); needs kappa+2lambda >= 3/2."""
    if p.kappa + 2 * p.lam < Fraction(3, 2):
        raise InadmissiblePair(
            f"B requires kappa + 2*lambda >= 3/2, got {p.kappa + 2 * p.lam}"
        )
    return ExactPair(p.lam - Fraction(1, 2), p.kappa + Fraction(1, 2))


def apply_word(word: str, seed: ExactPair = TRIVIAL_PAIR) -> ExactPair:
    """Apply a process word, rightmost letter first."""
    p = seed
    for pos in range(len(word) - 1, -1, -1):
        ch = word[pos]
        if ch == "A":
            p = a_process(p)
        elif ch == "B":
            try:
                p = b_process(p)
            except InadmissiblePair as exc:
                raise InadmissiblePair(f"{exc} (letter at position {pos})") from None
        else:
            raise ValueError(f"word may only contain A and B, got {ch!r}")
    return p


def search_optimal(
    objective: Callable[[ExactPair], Fraction],
    max_len: int,
    seed: ExactPair = TRIVIAL_PAIR,
) -> tuple[str, ExactPair]:
    """Minimize the objective over all admissible words of length <= max_len.

    Repeated pairs are pruned (identical pairs generate identical subtrees);
    ties break to the shorter word, then lexicographically. max_len <= 24.
    """
    if max_len > 24:
        raise ValueError("max_len is capped at 24")
    best_word, best_pair = "", seed
    best_val = objective(seed)
    seen = {(seed.kappa, seed.lam)}
    # prepending a letter applies one more process on top (the word is
    # evaluated rightmost-first)
    frontier = [("", seed)]
    for _ in range(max_len):
        candidates = []
        for word, pair in frontier:
            for letter in "AB":
                try:
                    child = a_process(pair) if letter == "A" else b_process(pair)
                except InadmissiblePair:
                    continue
                candidates.append((letter + word, child))
        candidates.sort(key=lambda wc: wc[0])
        frontier = []
        for wchild, child in candidates:
            key = (child.kappa, child.lam)
            if key in seen:
                continue
            seen.add(key)
            frontier.append((wchild, child))
            val = objective(child)
            if val < best_val or (
                val == best_val
                and (len(wchild), wchild) < (len(best_word), best_word)
            ):
                best_val, best_word, best_pair = val, wchild, child
        if not frontier:
            break
    return best_word, best_pair
