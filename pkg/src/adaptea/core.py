"""Search points, the OneMax fitness distance, the rate ladder and mutation.

Rates are handled as integer exponents of the adaptation factor ``F``; the
float value ``F**i`` is only ever computed on demand, so repeated up/down
moves never accumulate rounding error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True, eq=False)
class SearchPoint:
    """Immutable bit string. The optimum is the all-ones string."""

    bits: np.ndarray

    def __post_init__(self):
        bits = np.array(self.bits, dtype=bool).ravel()
        if bits.size == 0:
            raise ValueError("search point must have at least one bit")
        bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_string(cls, s: str) -> SearchPoint:
        if not s or set(s) - {"0", "1"}:
            raise ValueError(f"not a bit string: {s!r}")
        return cls(np.frombuffer(s.encode(), dtype=np.uint8) == ord("1"))

    @classmethod
    def ones(cls, n: int) -> SearchPoint:
        return cls(np.ones(n, dtype=bool))

    @classmethod
    def zeros(cls, n: int) -> SearchPoint:
        return cls(np.zeros(n, dtype=bool))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> SearchPoint:
        return cls(rng.random(n) < 0.5)

    @property
    def n(self) -> int:
        return self.bits.size

    @cached_property
    def distance(self) -> int:
        return int(self.n - np.count_nonzero(self.bits))

    def to_string(self) -> str:
        return (self.bits.astype(np.uint8) + ord("0")).tobytes().decode("ascii")

    def __eq__(self, other):
        if not isinstance(other, SearchPoint):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.n, np.packbits(self.bits).tobytes()))

    def __repr__(self):
        if self.n <= 32:
            return f"SearchPoint({self.to_string()!r})"
        return f"SearchPoint(n={self.n}, distance={self.distance})"


def fitness_distance(x: SearchPoint) -> int:
    """Number of zero bits, i.e. ``n - OneMax(x)``; 0 exactly at the optimum."""
    return x.distance


@dataclass(frozen=True)
class RateLadder:
    """The admissible strengths ``F**1 < F**2 < ... < F**i_max``."""

    F: float
    n: int
    i_max: int

    def rate(self, i: int) -> float:
        return self.F ** i

    @property
    def r_min(self) -> float:
        return self.rate(1)

    @property
    def r_max(self) -> float:
        return self.rate(self.i_max)

    def __contains__(self, i) -> bool:
        return isinstance(i, (int, np.integer)) and 1 <= i <= self.i_max

    def exponent_of(self, r: float, rel_tol: float = 1e-9) -> int:
        """Inverse of :meth:`rate`; raises if ``r`` is not on the ladder."""
        i = round(math.log(r) / math.log(self.F))
        if i not in self or not math.isclose(self.rate(i), r, rel_tol=rel_tol):
            raise ValueError(f"rate {r} is not a ladder value F**i, 1 <= i <= {self.i_max}")
        return i


def build_ladder(F: float, n: int) -> RateLadder:
    if not F > 1:
        raise ValueError(f"adaptation factor must exceed 1, got {F}")
    if n < 1:
        raise ValueError(f"problem size must be positive, got {n}")
    cap = n / (2 * F)
    if cap < F:
        raise ValueError(f"empty rate ladder: n/(2F) = {cap:g} < F = {F:g}")
    i = int(math.floor(math.log(cap) / math.log(F)))
    # log() may misround at exact powers; settle on F**i <= cap < F**(i+1)
    while F ** (i + 1) <= cap:
        i += 1
    while F ** i > cap:
        i -= 1
    return RateLadder(float(F), int(n), i)


def clamp_exponent(i: int, ladder: RateLadder) -> int:
    return min(max(1, int(i)), ladder.i_max)


def _check_strength(r: float, n: int) -> None:
    if not 0 <= r <= n:
        raise ValueError(f"mutation strength must lie in [0, n={n}], got {r}")


def standard_bit_mutation(x: SearchPoint, r: float, rng: np.random.Generator) -> SearchPoint:
    """Flip every bit of ``x`` independently with probability ``r/n``.

    Sparse sampler: the number of flips is drawn from Bin(n, r/n) and that
    many distinct positions are chosen uniformly, which induces the same
    distribution as per-bit coin flips.
    """
    n = x.n
    _check_strength(r, n)
    m = int(rng.binomial(n, r / n))
    bits = x.bits.copy()
    if m:
        pos = rng.choice(n, m, replace=False)
        bits[pos] = ~bits[pos]
    return SearchPoint(bits)


def per_bit_mutation(x: SearchPoint, r: float, rng: np.random.Generator) -> SearchPoint:
    """Reference sampler: one Bernoulli(r/n) trial per bit."""
    _check_strength(r, x.n)
    flips = rng.random(x.n) < r / x.n
    return SearchPoint(x.bits ^ flips)


@dataclass(frozen=True)
class Individual:
    point: SearchPoint
    rate_exponent: int

    @property
    def distance(self) -> int:
        return self.point.distance
