"""Seeded colorings and Monte Carlo trial budgets.

Every trial draws from its own SplitMix64 stream, so a trial's coloring is a
pure function of ``(seed, trial)``:

    trial_state = mix64(seed + (trial + 1) * GOLDEN)
    x_j         = mix64(trial_state + (j + 1) * GOLDEN)      # agent j
    color_j     = ((x_j >> 32) * palette) >> 32

all arithmetic modulo 2**64.  Separation colorings (red/blue) use the same
recipe with palette 2 on the salted seed ``mix64(seed ^ SEPARATION_SALT)``;
color 0 is red.  The batch generators below reproduce exactly the scalar
functions, which the tests check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from .oracle import ResourceError

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
SEPARATION_SALT = 0x5EBA7A7105EED5A1

RED = 0
BLUE = 1


class BudgetExceeded(ResourceError):
    def __init__(self, required: int, cap: int):
        super().__init__(f"trial budget exceeded: {required} trials required, cap is {cap}")
        self.required = required
        self.cap = cap


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def trial_state(seed: int, trial: int) -> int:
    return mix64(seed + (trial + 1) * GOLDEN)


def separation_seed(seed: int) -> int:
    return mix64((seed & MASK64) ^ SEPARATION_SALT)


@dataclass(frozen=True)
class Coloring:
    palette: int
    color: tuple[int, ...]

    def __len__(self):
        return len(self.color)

    def __getitem__(self, p: int) -> int:
        return self.color[p]


@dataclass(frozen=True)
class TrialPlan:
    p: float
    delta: float
    trials: int


def trial_budget(p: float, delta: float, cap: Optional[int] = 10_000_000) -> TrialPlan:
    """Trials needed so that a per-trial success chance ``p`` fails w.p. at most ``delta``."""
    if not (0 < p <= 1):
        raise ValueError(f"success probability must be in (0, 1], got {p}")
    if not (0 < delta < 1):
        raise ValueError(f"failure budget must be in (0, 1), got {delta}")
    t = max(1, math.ceil(math.log(1 / delta) / p))
    if p < 1:
        # guard against rounding in the division
        while t * math.log1p(-p) > math.log(delta):
            t += 1
    if cap is not None and t > cap:
        raise BudgetExceeded(t, cap)
    return TrialPlan(p, delta, t)


def _colors(n: int, palette: int, seed: int, trial: int) -> tuple[int, ...]:
    state = trial_state(seed, trial)
    out = []
    for j in range(n):
        x = mix64(state + (j + 1) * GOLDEN)
        out.append(((x >> 32) * palette) >> 32)
    return tuple(out)


def sample_k_coloring(n: int, k: int, seed: int, trial: int) -> Coloring:
    if k < 1:
        raise ValueError("palette must have at least one color")
    return Coloring(k, _colors(n, k, seed, trial))


def sample_separation(n: int, seed: int, trial: int) -> Coloring:
    return Coloring(2, _colors(n, 2, separation_seed(seed), trial))


# numpy batch versions ------------------------------------------------------

def _mix64_np(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(MIX1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(MIX2)
    return z ^ (z >> np.uint64(31))


def color_batch(n: int, palette: int, seed: int, start: int, stop: int) -> np.ndarray:
    """Colors for trials ``start..stop-1`` as an array of shape (trials, n)."""
    with np.errstate(over="ignore"):
        t = np.arange(start + 1, stop + 1, dtype=np.uint64)
        states = _mix64_np(np.uint64(seed & MASK64) + t * np.uint64(GOLDEN))
        j = np.arange(1, n + 1, dtype=np.uint64) * np.uint64(GOLDEN)
        x = _mix64_np(states[:, None] + j[None, :])
        return (((x >> np.uint64(32)) * np.uint64(palette)) >> np.uint64(32)).astype(np.int16)


def distinct_colorings(
    n: int,
    k: int,
    seed: int,
    trials: int,
    separation: bool = False,
    chunk: int = 1 << 15,
) -> Iterator[tuple[int, tuple[int, ...]]]:
    """Yield ``(trial, colors)`` for the first trial showing each distinct coloring.

    With ``separation`` the colors combine both draws: ``-1`` for a blue agent,
    otherwise the agent's color in ``[0, k)``.  Skipped trials would recompute
    a result already seen, so aggregation over the yielded trials equals
    aggregation over all trials.
    """
    seen: set[bytes] = set()
    sep_seed = separation_seed(seed)
    # once every possible coloring has appeared the remaining trials add nothing
    universe = (k + 1 if separation else k) ** n
    for start in range(0, trials, chunk):
        if len(seen) >= universe:
            return
        stop = min(trials, start + chunk)
        cols = color_batch(n, k, seed, start, stop)
        if separation:
            red = color_batch(n, 2, sep_seed, start, stop) == RED
            cols = np.where(red, cols, np.int16(-1))
        if n == 0:
            if start == 0:
                yield 0, ()
            return
        _, first = np.unique(cols, axis=0, return_index=True)
        for idx in np.sort(first):
            row = cols[idx]
            key = row.tobytes()
            if key in seen:
                continue
            seen.add(key)
            yield start + int(idx), tuple(int(c) for c in row)


def colorful_bound(k: int) -> float:
    """Chance that k fixed agents get pairwise distinct colors is at least e^-k."""
    return math.exp(-k)


def pinned_bound(k: int, automorphisms: int = 1) -> float:
    """Chance that k fixed agents land exactly on their seat colors, up to seat symmetry."""
    if k == 0:
        return 1.0
    return min(1.0, automorphisms / k**k)


def separation_bound(k: int, delta_plus: int) -> float:
    return 2.0 ** (-k * (1 + delta_plus))
