"""Exchange-stable arrangement deciders."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .model import Arrangement, Instance, check_exchange_stable, welfare
from .mua import kernelize
from .oracle import (
    DispatchError,
    ResourceError,
    SolveOutcome,
    SolverConfig,
    UnsupportedScale,
    fast_exchange_stable,
    fast_swap_gain_utility,
    fast_utilities,
    oracle_size,
    oracle_solve,
    outcome_from_certificate,
    trivial_outcome,
)

ALGORITHMS = ("oracle", "clique_nonneg", "kernel_kdelta", "swap_dynamics")


class SwapCapExceeded(ResourceError):
    """Swap dynamics ran past its step cap; on symmetric input this is a bug."""


@dataclass
class SwapTrace:
    steps: list[tuple[int, int, Fraction, Fraction]] = field(default_factory=list)
    cap: int = 0

    def __len__(self):
        return len(self.steps)


def _validated(inst: Instance, arr: Arrangement, algorithm: str, **kw) -> SolveOutcome:
    if not check_exchange_stable(inst, arr):
        raise AssertionError(f"{algorithm}: certificate is not exchange-stable")
    return outcome_from_certificate("esa", inst, arr, algorithm, **kw)


def esa_clique_nonneg(inst: Instance, config: SolverConfig = SolverConfig()) -> SolveOutcome:
    a, pa = inst.seat_analysis, inst.preference_analysis
    if a.k == 0:
        return trivial_outcome("esa", inst)
    if not (a.has("clique") and pa.nonnegative):
        raise DispatchError("clique_nonneg needs a clique seat graph and non-negative preferences")
    return _validated(inst, Arrangement.identity(inst.n), "clique_nonneg", seed=config.seed)


def esa_kernelize_kdelta(inst: Instance, config: SolverConfig = SolverConfig()) -> SolveOutcome:
    """k mutually indifferent agents on the non-isolated seats never envy anyone."""
    if inst.seat_analysis.k >= inst.n:
        raise DispatchError("kernel_kdelta needs at least one isolated seat")
    kr = kernelize(inst)
    if kr.solved:
        return _validated(inst, kr.certificate, "kernel_kdelta", seed=config.seed)
    sub = oracle_solve("esa", kr.reduced, config.oracle_cap)
    extra = {"kernel_size": kr.reduced.n}
    if not sub.exists:
        return SolveOutcome("esa", "kernel_kdelta", exists=False, trials_run=sub.trials_run,
                            seed=config.seed, extra=extra)
    arr = Arrangement(tuple(sub.certificate[kr.mapping.index(p)] for p in range(inst.n)))
    out = _validated(inst, arr, "kernel_kdelta", trials_run=sub.trials_run, seed=config.seed)
    out.extra = extra
    return out


def default_swap_cap(inst: Instance) -> int:
    magnitudes = {abs(w) for w in inst.profile.arcs.values()}
    return inst.n**3 * (len(magnitudes) + 1)


def swap_dynamics(inst: Instance, start: Optional[Arrangement] = None, cap: Optional[int] = None):
    """Swap the lexicographically smallest exchange-blocking pair until none is left.

    Returns ``(arrangement, trace)``.
    """
    n = inst.n
    if cap is None:
        cap = default_swap_cap(inst)
    arr = start if start is not None else Arrangement.identity(n)
    if arr.n != n:
        raise DispatchError("start arrangement has the wrong size")
    W = inst.profile.scaled
    nbrs = inst.seats.neighbors
    seat_of = list(arr.assignment)
    agent_at = list(arr.agent_at)
    trace = SwapTrace(cap=cap)
    scale = inst.profile.scale
    wel = sum(fast_utilities(W, nbrs, agent_at, seat_of))
    while True:
        utils = fast_utilities(W, nbrs, agent_at, seat_of)
        pair = None
        for p in range(n):
            for q in range(p + 1, n):
                if (
                    fast_swap_gain_utility(W, nbrs, agent_at, seat_of, p, q) > utils[p]
                    and fast_swap_gain_utility(W, nbrs, agent_at, seat_of, q, p) > utils[q]
                ):
                    pair = (p, q)
                    break
            if pair:
                break
        if pair is None:
            return Arrangement(tuple(seat_of)), trace
        if len(trace.steps) >= cap:
            raise SwapCapExceeded(f"swap dynamics exceeded {cap} steps")
        p, q = pair
        a, b = seat_of[p], seat_of[q]
        seat_of[p], seat_of[q] = b, a
        agent_at[a], agent_at[b] = q, p
        after = sum(fast_utilities(W, nbrs, agent_at, seat_of))
        trace.steps.append((p, q, Fraction(wel, scale), Fraction(after, scale)))
        wel = after


def esa_swap_dynamics_symmetric(
    inst: Instance,
    config: SolverConfig = SolverConfig(),
    start: Optional[Arrangement] = None,
) -> SolveOutcome:
    if not inst.preference_analysis.symmetric:
        raise DispatchError("swap_dynamics needs symmetric preferences")
    arr, trace = swap_dynamics(inst, start, config.swap_cap)
    out = _validated(inst, arr, "swap_dynamics", trials_run=len(trace), seed=config.seed)
    out.extra = {"trace": trace, "start_welfare": welfare(inst, start or Arrangement.identity(inst.n))}
    return out


def esa_select(inst: Instance, config: SolverConfig = SolverConfig()) -> str:
    a, pa = inst.seat_analysis, inst.preference_analysis
    k = a.k
    if k == 0:
        return "trivial"
    size = oracle_size(inst.n, k)
    if size <= config.tiny:
        return "oracle"
    if a.has("clique") and pa.nonnegative:
        return "clique_nonneg"
    if pa.symmetric:
        return "swap_dynamics"
    if k < inst.n and (kernelize(inst).solved or size <= config.oracle_cap):
        return "kernel_kdelta"
    if size <= config.oracle_cap:
        return "oracle"
    raise UnsupportedScale(f"no ESA solver applies within resource caps (n={inst.n}, k={k})")


SOLVERS: dict[str, Callable[[Instance, SolverConfig], SolveOutcome]] = {
    "clique_nonneg": esa_clique_nonneg,
    "kernel_kdelta": esa_kernelize_kdelta,
    "swap_dynamics": esa_swap_dynamics_symmetric,
}


def esa_solve(inst: Instance, config: SolverConfig = SolverConfig()) -> SolveOutcome:
    algo = config.algorithm
    if algo == "auto":
        algo = esa_select(inst, config)
    if algo == "trivial":
        return trivial_outcome("esa", inst)
    if algo == "oracle":
        out = oracle_solve("esa", inst, config.oracle_cap)
        out.seed = config.seed
        return out
    if algo not in SOLVERS:
        raise DispatchError(f"unknown ESA algorithm {algo!r}; choose from {', '.join(ALGORITHMS)}")
    return SOLVERS[algo](inst, config)


__all__ = [
    "ALGORITHMS",
    "SwapCapExceeded",
    "SwapTrace",
    "esa_clique_nonneg",
    "esa_kernelize_kdelta",
    "esa_select",
    "esa_solve",
    "esa_swap_dynamics_symmetric",
    "swap_dynamics",
]
