"""Stochastic magic-state cultivation with cancel/restart semantics.

Cultivation time follows an exponential law in physical time units; a
draw t converts to logical cycles as max(min_cycles, ceil(t / d)). The
ceiling means a freshly restarted cell is never ready in the cycle it
restarts. Completions are counted when a cell flips to Ready, so a
ready state later destroyed by routing still counts as completed, while
canceling a running cultivation counts as a termination.

All draws come from one caller-supplied generator, consumed in a fixed
documented order (cells sorted by (y, x), events by cycle), so runs are
reproducible bit-for-bit from the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError

Coord = tuple[int, int]

# Rate corresponding to an effectively always-immediate cultivation; used
# when a sweep asks for a mean of exactly min_cycles (the exponential tail
# above it becomes negligible rather than exactly zero).
_IMMEDIATE_RATE_SCALE = 36.0


@dataclass(frozen=True)
class CultivationParams:
    lam: float = 0.00227
    distance: int = 17
    min_cycles: int = 1

    def __post_init__(self):
        if self.lam <= 0:
            raise InputError("cultivation rate must be positive")
        if self.distance < 1 or self.min_cycles < 1:
            raise InputError("distance and min_cycles must be >= 1")

    def mean_cycles(self) -> float:
        """Exact expectation of the sampled cycle count.

        E[max(m, ceil(t/d))] = m + sum_{k>m} P(ceil(t/d) >= k)
                             = m + e^(-lam*m*d) / (1 - e^(-lam*d)).
        """
        step = math.exp(-self.lam * self.distance)
        return self.min_cycles + step**self.min_cycles / (1.0 - step)

    @classmethod
    def from_mean_cycles(cls, mean: float, distance: int = 17,
                         min_cycles: int = 1) -> "CultivationParams":
        """Rate whose sampled mean equals the target (geometric inversion)."""
        if mean < min_cycles:
            raise InputError(f"mean {mean} below min_cycles {min_cycles}")
        if mean == min_cycles:
            return cls(_IMMEDIATE_RATE_SCALE / distance, distance, min_cycles)
        # With m = min_cycles, mean = m + p^m/(1-p) for p = e^(-lam*d);
        # solve for p (closed form for m=1, bisection otherwise).
        if min_cycles == 1:
            p = 1.0 - 1.0 / mean
        else:
            lo, hi = 0.0, 1.0 - 1e-12
            for _ in range(200):
                p = (lo + hi) / 2
                if p**min_cycles / (1.0 - p) > mean - min_cycles:
                    hi = p
                else:
                    lo = p
            p = (lo + hi) / 2
        return cls(-math.log(p) / distance, distance, min_cycles)


def cycles_from_uniform(u: float, params: CultivationParams) -> int:
    """Inverse-CDF transform: u in (0, 1] -> cycle count."""
    t = -math.log(u) / params.lam
    return max(params.min_cycles, math.ceil(t / params.distance))


def sample_cultivation_cycles(rng: np.random.Generator, params: CultivationParams) -> int:
    """One cultivation duration in logical cycles (consumes one uniform)."""
    return cycles_from_uniform(1.0 - rng.random(), params)


def sample_cultivation_cycles_batch(
    rng: np.random.Generator, params: CultivationParams, n: int
) -> np.ndarray:
    """Vector of n draws, identical to n sequential scalar draws."""
    u = 1.0 - rng.random(n)
    t = -np.log(u) / params.lam
    cycles = np.ceil(t / params.distance).astype(np.int64)
    return np.maximum(cycles, params.min_cycles)


class CultivationState:
    """Per-cell cultivation status for one scheduler run.

    Cells are fixed at construction (sorted by (y, x)); the scheduler
    addresses them by index into that order.
    """

    def __init__(self, cells: tuple[Coord, ...], params: CultivationParams,
                 rng: np.random.Generator, start_cycle: int = 0):
        self.cells = tuple(sorted(cells, key=lambda c: (c[1], c[0])))
        self.params = params
        self._rng = rng
        n = len(self.cells)
        self.completed_count = 0
        self.completed_cycle_sum = 0
        self.terminated_count = 0
        self._last_cycle = start_cycle
        self._is_ready = np.zeros(n, dtype=bool)
        samples = sample_cultivation_cycles_batch(rng, params, n)
        self._sample = samples
        self._ready_at = start_cycle + samples

    def __len__(self) -> int:
        return len(self.cells)

    def advance(self, cycle: int) -> np.ndarray:
        """Flip cells whose time has come; returns indices of all Ready cells."""
        if cycle < self._last_cycle:
            raise ValueError(f"cycle went backwards: {self._last_cycle} -> {cycle}")
        self._last_cycle = cycle
        flipping = (~self._is_ready) & (self._ready_at <= cycle)
        k = int(np.count_nonzero(flipping))
        if k:
            self.completed_count += k
            self.completed_cycle_sum += int(self._sample[flipping].sum())
            self._is_ready[flipping] = True
        return np.flatnonzero(self._is_ready)

    def is_ready(self, index: int) -> bool:
        return bool(self._is_ready[index])

    def any_cultivating(self) -> bool:
        return bool((~self._is_ready).any())

    def restart(self, index: int, at_cycle: int) -> None:
        """Cancel/consume the cell and start a fresh attempt next cycle.

        A canceled in-progress cultivation counts as terminated; a Ready
        cell was already counted as completed when it flipped.
        """
        if not self._is_ready[index]:
            self.terminated_count += 1
        sample = sample_cultivation_cycles(self._rng, self.params)
        self._sample[index] = sample
        self._ready_at[index] = at_cycle + sample
        self._is_ready[index] = False

    def avg_completed_cultivation(self) -> float | None:
        if self.completed_count == 0:
            return None
        return self.completed_cycle_sum / self.completed_count
