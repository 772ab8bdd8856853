"""Occupation probabilities of birth-death chains with a strong pull to state 1.

States are numbered from 1. From state ``i`` the chain moves up with
probability ``p[i-1]``; otherwise it moves down, or stays when ``i = 1``.
A list of ``m`` up-probabilities describes a chain on ``1..m+1`` whose top
state can only move down.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class PreconditionError(ValueError):
    def __init__(self, index: int, message: str):
        super().__init__(f"state {index}: {message}")
        self.index = index


def chain_occupancy(p_bounds, check: bool = True) -> list[float]:
    """Upper bounds ``q_1 = 1``, ``q_i = prod_{j<i} p_j / (1 - p_j)``.

    The bound needs ``p_{i-1} >= p_i / (1 - p_i)`` for every ``i >= 2``; with
    ``check`` a violation raises :class:`PreconditionError` naming ``i``.
    Zero entries are accepted (an impossible up-move, or a probability that
    underflows in double precision).
    """
    p = [float(v) for v in p_bounds]
    for i, v in enumerate(p, start=1):
        if not 0 <= v < 1:
            raise PreconditionError(i, f"up-probability must lie in [0, 1), got {v}")
    if check:
        for i in range(2, len(p) + 1):
            prev, cur = p[i - 2], p[i - 1]
            if prev < cur / (1 - cur):
                raise PreconditionError(
                    i, f"p_{i - 1} = {prev:.6g} < p_{i}/(1 - p_{i}) = {cur / (1 - cur):.6g}"
                )
    q = [1.0]
    for v in p:
        q.append(q[-1] * v / (1 - v))
    return q


def rate_up_probabilities(F: float, states: int) -> list[float]:
    """``p_j = exp(-9 F**j)`` for ``j = 1..states-1`` (rate-occupation chain)."""
    return [math.exp(-9 * F**j) for j in range(1, states)]


def simulate_birth_death(p_list, steps: int, trials: int, rng: np.random.Generator) -> np.ndarray:
    """Mean fraction of times ``0..steps`` spent in each state, over ``trials`` chains."""
    up = np.append(np.asarray(p_list, dtype=float), 0.0)
    state = np.zeros(trials, dtype=np.intp)
    counts = np.zeros((trials, up.size), dtype=np.int64)
    rows = np.arange(trials)
    counts[:, 0] = 1
    for _ in range(steps):
        move_up = rng.random(trials) < up[state]
        state = np.where(move_up, state + 1, np.maximum(state - 1, 0))
        counts[rows, state] += 1
    return (counts / (steps + 1)).mean(axis=0)


@dataclass(frozen=True)
class OccupancyRow:
    state: int
    empirical: float
    bound: float
    sigma: float
    rate_bound: float | None = None

    @property
    def dominated(self) -> bool:
        return self.empirical <= self.bound + 3 * self.sigma


def occupancy_sigma(q: float, trials: int) -> float:
    """Standard error of a mean of ``trials`` [0,1]-valued fractions whose mean is at most ``q``."""
    v = q * (1 - q) if q <= 0.5 else 0.25
    return math.sqrt(v / trials)


def occupancy_check(p_list, steps: int, trials: int, rng: np.random.Generator,
                    F: float | None = None) -> list[OccupancyRow]:
    """Compare simulated occupancy with :func:`chain_occupancy` state by state.

    With ``F`` given, each row also carries ``exp(-8 F**(i-1))``, the bound
    on the rate occupation for ``i >= 2``.
    """
    q = chain_occupancy(p_list)
    empirical = simulate_birth_death(p_list, steps, trials, rng)
    rows = []
    for i, (emp, qi) in enumerate(zip(empirical.tolist(), q), start=1):
        rate_bound = math.exp(-8 * F ** (i - 1)) if F is not None and i >= 2 else None
        rows.append(OccupancyRow(i, emp, qi, occupancy_sigma(qi, trials), rate_bound))
    return rows
