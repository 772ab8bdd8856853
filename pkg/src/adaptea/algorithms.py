"""(1,lambda) EA variants on OneMax: self-adaptive, static 1/n, fitness-dependent.

The self-adaptive variant keeps the mutation strength inside the individual.
Each offspring moves the parent's rate exponent one step down or up by a
fair coin, mutates with the resulting strength, and the winner of the
generation (comma selection, ties resolved towards the lower strength under
the ``biased`` rule) is clamped back onto the ladder.

:func:`run` does not mutate full bit strings for every offspring. On OneMax
an offspring's fitness depends only on how many zero bits (``good``) and
how many one bits (``bad``) were flipped, and these are independent
Bin(k, p) and Bin(n-k, p) counts. Only the winner's flips are materialised,
choosing the flipped positions uniformly given the counts, which reproduces
standard bit mutation exactly in distribution.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import (
    Individual,
    RateLadder,
    SearchPoint,
    build_ladder,
    clamp_exponent,
    standard_bit_mutation,
)

VARIANTS = ("self-adaptive", "static", "fitness-dependent")
TIE_RULES = ("biased", "random")
_TIE_ALIASES = {"prefer-low-rate": "biased", "biased": "biased", "random": "random"}


def normalize_tie_rule(rule: str) -> str:
    try:
        return _TIE_ALIASES[rule]
    except KeyError:
        raise ValueError(f"unknown tie-breaking rule {rule!r}; use 'biased' or 'random'") from None


def default_max_generations(n: int, lam: int) -> int:
    return int(math.ceil(100 * (n * math.log(n) / lam + n)))


@dataclass(frozen=True)
class AlgorithmConfig:
    n: int
    lam: int
    variant: str = "self-adaptive"
    F: float | None = None
    r_init: int = 1
    tie_break: str = "biased"
    max_generations: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; choose from {VARIANTS}")
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if self.lam < 1:
            raise ValueError(f"lambda must be at least 1, got {self.lam}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "tie_break", normalize_tie_rule(self.tie_break))
        if self.variant == "self-adaptive":
            if self.F is None:
                raise ValueError("self-adaptive variant needs an adaptation factor F")
            ladder = build_ladder(self.F, self.n)
            if self.r_init not in ladder:
                raise ValueError(
                    f"initial rate exponent {self.r_init} outside ladder [1..{ladder.i_max}]"
                )
        if self.max_generations is None:
            object.__setattr__(self, "max_generations", default_max_generations(self.n, self.lam))
        elif self.max_generations < 0:
            raise ValueError("max_generations must be non-negative")

    @property
    def ladder(self) -> RateLadder | None:
        return build_ladder(self.F, self.n) if self.variant == "self-adaptive" else None

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class RunRecord:
    """Per-generation trace of one run.

    ``rates`` holds the strength ``r`` of the parent (mutation probability
    ``r/n``); ``exponents`` is only set for the self-adaptive variant.
    """

    config: AlgorithmConfig
    generations: np.ndarray
    distances: np.ndarray
    rates: np.ndarray
    exponents: np.ndarray | None
    generations_to_optimum: int | None
    final: SearchPoint = field(repr=False)

    @property
    def found(self) -> bool:
        return self.generations_to_optimum is not None

    @property
    def seed(self) -> int:
        return self.config.seed

    @property
    def generations_run(self) -> int:
        return int(self.generations[-1])

    @property
    def evaluations(self) -> int:
        return self.config.lam * self.generations_run

    def rows(self):
        """Yield ``(t, k, r)`` tuples in generation order."""
        for t, k, r in zip(self.generations.tolist(), self.distances.tolist(), self.rates.tolist()):
            yield t, k, r


def fitness_dependent_rate(d: int, n: int, lam: int) -> float:
    """Mutation probability ``max(ln(lam) / (n ln(e n / d)), 1/n)``, capped at 1.

    The cap only matters for tiny ``n`` (e.g. ``n = 1``, ``lam >= 3``).
    """
    if not 1 <= d <= n:
        raise ValueError(f"fitness distance must be in [1, n={n}], got {d}")
    return min(1.0, max(math.log(lam) / (n * math.log(math.e * n / d)), 1 / n))


def select_best(fitness, low_rate, tie_break: str, rng: np.random.Generator) -> int:
    """Index of a fitness-minimal offspring.

    With the ``biased`` rule, minimal offspring created with the lower
    strength are preferred; all remaining ties are broken uniformly.
    """
    fitness = np.asarray(fitness)
    if fitness.size == 0:
        raise ValueError("cannot select from an empty offspring population")
    best = np.flatnonzero(fitness == fitness.min())
    if normalize_tie_rule(tie_break) == "biased" and low_rate is not None:
        low = best[np.asarray(low_rate, dtype=bool)[best]]
        if low.size:
            best = low
    if best.size == 1:
        return int(best[0])
    return int(best[rng.integers(best.size)])


def step_self_adaptive(
    parent: Individual, cfg: AlgorithmConfig, ladder: RateLadder, rng: np.random.Generator
) -> Individual:
    """One generation on explicit bit strings (reference implementation).

    Offspring exponents may leave the ladder (e.g. ``F**0 = 1``); only the
    selected winner is clamped.
    """
    i = parent.rate_exponent
    if i not in ladder:
        raise ValueError(f"parent rate exponent {i} outside ladder [1..{ladder.i_max}]")
    low = np.empty(cfg.lam, dtype=bool)
    kids = []
    for j in range(cfg.lam):
        low[j] = rng.random() < 0.5
        kids.append(standard_bit_mutation(parent.point, ladder.rate(i - 1 if low[j] else i + 1), rng))
    fitness = [kid.distance for kid in kids]
    w = select_best(fitness, low, cfg.tie_break, rng)
    return Individual(kids[w], clamp_exponent(i - 1 if low[w] else i + 1, ladder))


class _OneMaxParent:
    """Bit string plus an index of its zero/one positions for O(flips) updates.

    ``perm[:k]`` lists the zero positions, ``perm[k:]`` the one positions and
    ``slot`` is the inverse permutation.
    """

    def __init__(self, bits: np.ndarray):
        self.n = bits.size
        self.bits = bytearray(bits.astype(np.uint8).tobytes())
        zeros = np.flatnonzero(~bits)
        ones = np.flatnonzero(bits)
        self.perm = np.concatenate([zeros, ones]).tolist()
        self.slot = [0] * self.n
        for s, pos in enumerate(self.perm):
            self.slot[pos] = s
        self.k = zeros.size

    def _swap(self, s, t):
        perm, slot = self.perm, self.slot
        a, b = perm[s], perm[t]
        perm[s], perm[t] = b, a
        slot[a], slot[b] = t, s

    def apply(self, good: int, bad: int, rng: np.random.Generator) -> None:
        k, perm = self.k, self.perm
        fixed = [perm[s] for s in rng.choice(k, good, replace=False).tolist()] if good else ()
        broken = [perm[k + s] for s in rng.choice(self.n - k, bad, replace=False).tolist()] if bad else ()
        for pos in fixed:
            self._swap(self.slot[pos], self.k - 1)
            self.k -= 1
            self.bits[pos] = 1
        for pos in broken:
            self._swap(self.slot[pos], self.k)
            self.k += 1
            self.bits[pos] = 0

    def point(self) -> SearchPoint:
        return SearchPoint(np.frombuffer(bytes(self.bits), dtype=np.uint8).astype(bool))


def run(cfg: AlgorithmConfig, start: SearchPoint | None = None) -> RunRecord:
    """Run one trial until the optimum is found or ``max_generations`` is hit.

    The initial parent is uniform at random unless ``start`` is given.

    Draw order per generation is fixed (rate coins, good-flip counts,
    bad-flip counts, tie draw, winner positions), so a run is a pure function
    of ``(cfg, seed)``.
    """
    rng = np.random.default_rng(cfg.seed)
    n, lam = cfg.n, cfg.lam
    if start is None:
        parent = _OneMaxParent(rng.random(n) < 0.5)
    elif start.n != n:
        raise ValueError(f"start point has length {start.n}, config has n={n}")
    else:
        parent = _OneMaxParent(start.bits)
    sa = cfg.variant == "self-adaptive"
    ladder = cfg.ladder
    i = cfg.r_init if sa else None

    def strength(k):
        if sa:
            return ladder.rate(i)
        if cfg.variant == "static" or k == 0:
            return 1.0
        return fitness_dependent_rate(k, n, lam) * n

    ts, ks, rs, es = [0], [parent.k], [strength(parent.k)], [i]
    t = 0
    while parent.k > 0 and t < cfg.max_generations:
        t += 1
        k = parent.k
        if sa:
            low = rng.random(lam) < 0.5
            p = np.where(low, ladder.rate(i - 1), ladder.rate(i + 1)) / n
            good = rng.binomial(k, p)
            bad = rng.binomial(n - k, p)
        else:
            low = None
            p = strength(k) / n
            good = rng.binomial(k, p, size=lam)
            bad = rng.binomial(n - k, p, size=lam)
        w = select_best(k - good + bad, low, cfg.tie_break, rng)
        parent.apply(int(good[w]), int(bad[w]), rng)
        if sa:
            i = clamp_exponent(i - 1 if low[w] else i + 1, ladder)
        ts.append(t)
        ks.append(parent.k)
        rs.append(strength(parent.k))
        es.append(i)

    return RunRecord(
        config=cfg,
        generations=np.array(ts, dtype=np.int64),
        distances=np.array(ks, dtype=np.int64),
        rates=np.array(rs, dtype=float),
        exponents=np.array(es, dtype=np.int64) if sa else None,
        generations_to_optimum=t if parent.k == 0 else None,
        final=parent.point(),
    )
