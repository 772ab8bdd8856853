"""Exact one-offspring probabilities for standard bit mutation on OneMax.

A parent at fitness distance ``k`` has ``k`` zero bits (flipping one is a
"good" flip) and ``n - k`` one bits ("bad" flips). With ``p = r/n`` the
two counts are independent binomials, so the distribution of the distance
change ``delta = good - bad`` is the convolution of Bin(k, p) with the
mirrored Bin(n - k, p).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.stats import binom


def _check_state(n: int, k: int, r: float) -> None:
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if not 0 <= k <= n:
        raise ValueError(f"fitness distance must lie in [0, {n}], got {k}")
    if not 0 <= r <= n:
        raise ValueError(f"mutation strength must lie in [0, {n}], got {r}")


def binomial_pmf(m: int, p: float) -> np.ndarray:
    """Vector ``P(X = j)`` for ``X ~ Bin(m, p)``, ``j = 0..m``."""
    return binom.pmf(np.arange(m + 1), m, p)


@dataclass(frozen=True)
class JumpDistribution:
    """Law of ``delta`` (distance decrease) for one offspring.

    ``probs[j]`` is the probability of ``delta = deltas[j]``; the support is
    ``-(n - k) .. k``.
    """

    n: int
    k: int
    r: float
    probs: np.ndarray

    @property
    def deltas(self) -> np.ndarray:
        return np.arange(-(self.n - self.k), self.k + 1)

    def prob(self, delta: int) -> float:
        j = delta + self.n - self.k
        return float(self.probs[j]) if 0 <= j < self.probs.size else 0.0

    def q(self, i: int) -> float:
        """Probability that the offspring has distance exactly ``k - i``."""
        return self.prob(i)

    def Q(self, i: int) -> float:
        """Probability that the offspring has distance at most ``k - i``."""
        j = max(i + self.n - self.k, 0)
        return math.fsum(self.probs[j:].tolist())

    def as_dict(self) -> dict[int, float]:
        return dict(zip(self.deltas.tolist(), self.probs.tolist()))

    def increase_at_least(self, z: int) -> float:
        """``P(Z >= z)`` for the distance increase ``Z = -delta``."""
        j = -z + self.n - self.k
        return math.fsum(self.probs[: max(j + 1, 0)].tolist())

    def increase_at_most(self, z: int) -> float:
        """``P(Z <= z)`` for the distance increase ``Z = -delta``."""
        return self.Q(-z)

    def mean(self) -> float:
        return float(np.dot(self.deltas, self.probs))


def exact_jump_distribution(n: int, k: int, r: float) -> JumpDistribution:
    _check_state(n, k, r)
    p = r / n
    good = binomial_pmf(k, p)
    bad = binomial_pmf(n - k, p)
    probs = np.convolve(good, bad[::-1])
    return JumpDistribution(n, k, r, probs)


def local_probabilities(n: int, k: int, r: float) -> tuple[float, float, float]:
    """``(p_minus, p_zero, p_prime)``: better, equally good, no one bit flipped."""
    _check_state(n, k, r)
    if k < 1 or r <= 0:
        raise ValueError("local probabilities need k >= 1 and r > 0")
    dist = exact_jump_distribution(n, k, r)
    p_minus = dist.Q(1)
    p_zero = dist.prob(0)
    p_prime = (1 - r / n) ** (n - k)
    return p_minus, p_zero, p_prime


# -- fitness-dependent rate thresholds ---------------------------------------


def threshold_L(n: int, F: float, k: float) -> float:
    if not 0 < k < n / 2:
        raise ValueError(f"L(k) needs 0 < k < n/2, got k={k}")
    return 1 / (F * math.log(math.e * n / k))


def threshold_U(n: int, k: float) -> float:
    if not 0 <= k < n / 2:
        raise ValueError(f"U(k) needs 0 <= k < n/2 (unbounded at n/2), got k={k}")
    return n * (2 * n - k) / (22 * (n - 2 * k) ** 2)


def rate_upper(n: int, lam: int, F: float, k: float) -> float:
    """Piecewise upper rate threshold ``r_u(k)``."""
    ln_lam = math.log(lam)
    if 7 * n / 20 <= k < n / 2:
        return n * n * ln_lam / (12 * (n - 2 * k) ** 2)
    if lam > 1 and n / ln_lam < k < 7 * n / 20:
        return 10 * threshold_U(n, k) * ln_lam / 9
    raise ValueError(f"r_u(k) undefined for k={k} (needs n/ln(lambda) < k < n/2)")


def rate_lower(n: int, lam: int, F: float, k: float) -> float:
    """Piecewise lower rate threshold ``r_l(k)``."""
    if lam > 1:
        ln_lam = math.log(lam)
        if n / ln_lam <= k < n / 2:
            return threshold_L(n, F, k) * ln_lam / 2
        if n / lam < k < n / ln_lam:
            return F
    raise ValueError(f"r_l(k) undefined for k={k} (needs n/lambda < k < n/2)")


@dataclass(frozen=True)
class RateThresholds:
    n: int
    lam: int
    F: float
    k: float
    L: float | None
    U: float | None
    r_l: float | None
    r_u: float | None


def rate_thresholds(n: int, lam: int, F: float, k: float) -> RateThresholds:
    """All four thresholds at ``k``; entries outside their domain are ``None``."""

    def attempt(fn, *args):
        try:
            return fn(*args)
        except ValueError:
            return None

    return RateThresholds(
        n, lam, F, k,
        L=attempt(threshold_L, n, F, k),
        U=attempt(threshold_U, n, k),
        r_l=attempt(rate_lower, n, lam, F, k),
        r_u=attempt(rate_upper, n, lam, F, k),
    )


# -- Bernstein tail of a single offspring ------------------------------------


@dataclass(frozen=True)
class TailCheck:
    n: int
    k: int
    r: float
    gap: float
    side: str
    exact: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.exact <= self.bound


def bernstein_bound(n: int, r: float, gap: float) -> float:
    """``exp(-gap^2 / (2 (1 - p) (r + gap/3)))`` with ``p = r/n``."""
    if gap == 0:
        return 1.0
    p = r / n
    return math.exp(-gap * gap / (2 * (1 - p) * (r + gap / 3)))


def tail_bound_check(n: int, k: int, r: float, gap: float, side: str = "upper") -> TailCheck:
    """Exact tail of the distance increase ``Z`` against its Bernstein bound.

    ``upper``: ``P(Z >= E[Z] + gap)``; ``lower``: ``P(Z <= E[Z] - gap)``,
    with ``E[Z] = (n - 2k) r / n``.
    """
    _check_state(n, k, r)
    if r > n / 2:
        raise ValueError(f"tail bound needs r <= n/2, got r={r}")
    if gap < 0:
        raise ValueError("gap must be non-negative")
    dist = exact_jump_distribution(n, k, r)
    mean = Fraction(n - 2 * k) * Fraction(r) / n
    if side == "upper":
        exact = dist.increase_at_least(math.ceil(mean + Fraction(gap)))
    elif side == "lower":
        exact = dist.increase_at_most(math.floor(mean - Fraction(gap)))
    else:
        raise ValueError(f"side must be 'upper' or 'lower', got {side!r}")
    return TailCheck(n, k, r, gap, side, exact, bernstein_bound(n, r, gap))
