"""Brute-force oracles used by the tests.

Nothing here calls into ``adaptea``: distributions come from enumerating
every flip mask with exact rational weights.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache


@lru_cache(maxsize=None)
def flip_counts(n: int, k: int) -> dict[tuple[int, int], int]:
    """Number of masks over ``n`` bits with ``g`` flips among the first ``k`` and ``b`` among the rest."""
    counts: dict[tuple[int, int], int] = {}
    low = (1 << k) - 1
    for mask in range(1 << n):
        g = bin(mask & low).count("1")
        b = bin(mask >> k).count("1")
        counts[(g, b)] = counts.get((g, b), 0) + 1
    return counts


def mask_jump_distribution(n: int, k: int, r) -> dict[int, Fraction]:
    """Exact law of ``delta = good - bad`` for a parent with ``k`` zero bits, mutation rate ``r/n``."""
    p = Fraction(r) / n
    q = 1 - p
    out: dict[int, Fraction] = {}
    for (g, b), c in flip_counts(n, k).items():
        m = g + b
        out[g - b] = out.get(g - b, Fraction(0)) + c * p**m * q ** (n - m)
    return out


def mask_increase_tail(n: int, k: int, r, threshold, side: str = "upper") -> Fraction:
    """``P(Z >= threshold)`` or ``P(Z <= threshold)`` for ``Z = -delta`` by enumeration."""
    dist = mask_jump_distribution(n, k, r)
    if side == "upper":
        return sum((w for d, w in dist.items() if -d >= threshold), Fraction(0))
    return sum((w for d, w in dist.items() if -d <= threshold), Fraction(0))


def total_variation(a: dict, b: dict) -> float:
    keys = set(a) | set(b)
    return 0.5 * sum(abs(float(a.get(x, 0)) - float(b.get(x, 0))) for x in keys)
