"""Exhaustive reference solver and the shared solver result/config types."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from typing import Optional, Sequence

from .model import (
    Arrangement,
    Instance,
    SeatplanError,
    check_envy_free,
    check_exchange_stable,
    egalitarian,
    welfare,
)

PROBLEMS = ("mwa", "mua", "efa", "esa")


class ResourceError(SeatplanError):
    """A configured resource guard refused the computation."""


class OracleTooLarge(ResourceError):
    pass


class DispatchError(SeatplanError):
    """A solver was asked to run outside its preconditions."""


class UnsupportedScale(ResourceError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    algorithm: str = "auto"
    seed: int = 0
    delta: float = 1e-6
    max_trials: int = 10_000_000
    max_partition_k: int = 10
    oracle_cap: int = 10**8
    tiny: int = 5_040  # oracle evaluations below which "auto" just enumerates
    swap_cap: Optional[int] = None


@dataclass
class SolveOutcome:
    problem: str
    algorithm: str
    value: Optional[Fraction] = None
    exists: Optional[bool] = None
    certificate: Optional[Arrangement] = None
    trials_run: int = 0
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def verify(self, inst: Instance) -> bool:
        """Re-evaluate the certificate against the instance."""
        if self.certificate is None:
            return self.problem in ("efa", "esa") and self.exists is False
        if self.problem == "mwa":
            return welfare(inst, self.certificate) == self.value
        if self.problem == "mua":
            return egalitarian(inst, self.certificate) == self.value
        if self.problem == "efa":
            return bool(check_envy_free(inst, self.certificate)) and self.exists is True
        return bool(check_exchange_stable(inst, self.certificate)) and self.exists is True


def outcome_from_certificate(
    problem: str, inst: Instance, arr: Arrangement, algorithm: str, **kw
) -> SolveOutcome:
    if problem == "mwa":
        return SolveOutcome(problem, algorithm, value=welfare(inst, arr), certificate=arr, **kw)
    if problem == "mua":
        return SolveOutcome(problem, algorithm, value=egalitarian(inst, arr), certificate=arr, **kw)
    return SolveOutcome(problem, algorithm, exists=True, certificate=arr, **kw)


def trivial_outcome(problem: str, inst: Instance) -> SolveOutcome:
    """Edgeless seat graph: every arrangement is optimal and stable."""
    return outcome_from_certificate(problem, inst, Arrangement.identity(inst.n), "trivial")


# Integer-scaled evaluators over an agent_at list.  Used in inner loops.

def fast_utilities(W: Sequence[Sequence[int]], nbrs, agent_at: Sequence[int], seat_of) -> list[int]:
    return [sum(W[p][agent_at[v]] for v in nbrs[seat_of[p]]) for p in range(len(seat_of))]


def fast_swap_gain_utility(W, nbrs, agent_at, seat_of, p: int, q: int) -> int:
    """Utility of ``p`` after trading seats with ``q``."""
    a, b = seat_of[p], seat_of[q]
    row = W[p]
    total = 0
    for v in nbrs[b]:
        total += row[q] if v == a else row[agent_at[v]]
    return total


def fast_envy_free(W, nbrs, agent_at, seat_of, utils=None) -> bool:
    n = len(seat_of)
    if utils is None:
        utils = fast_utilities(W, nbrs, agent_at, seat_of)
    for p in range(n):
        u = utils[p]
        for q in range(n):
            if q != p and fast_swap_gain_utility(W, nbrs, agent_at, seat_of, p, q) > u:
                return False
    return True


def fast_exchange_stable(W, nbrs, agent_at, seat_of, utils=None) -> bool:
    n = len(seat_of)
    if utils is None:
        utils = fast_utilities(W, nbrs, agent_at, seat_of)
    for p in range(n):
        for q in range(p + 1, n):
            if (
                fast_swap_gain_utility(W, nbrs, agent_at, seat_of, p, q) > utils[p]
                and fast_swap_gain_utility(W, nbrs, agent_at, seat_of, q, p) > utils[q]
            ):
                return False
    return True


def oracle_size(n: int, k: int) -> int:
    return math.comb(n, k) * math.factorial(k)


def oracle_solve(problem: str, inst: Instance, cap: int = 10**8) -> SolveOutcome:
    """Enumerate every k-subset of agents and every placement on the non-isolated seats.

    Remaining agents take the isolated seats in ascending order.  Ties go to
    the first arrangement in (subset lex, permutation lex) order.
    """
    if problem not in PROBLEMS:
        raise DispatchError(f"unknown problem {problem!r}")
    a = inst.seat_analysis
    n, k = inst.n, a.k
    size = oracle_size(n, k)
    if size > cap:
        raise OracleTooLarge(f"too large for oracle: {size} evaluations exceed cap {cap}")
    if k == 0:
        out = trivial_outcome(problem, inst)
        out.algorithm = "oracle"
        out.trials_run = 1
        return out

    W = inst.profile.scaled
    nbrs = inst.seats.neighbors
    non = a.nonisolated
    iso = [v for v in range(n) if v not in set(non)]

    best_val = None
    best_at = None
    found = None
    evaluated = 0
    agent_at = [0] * n
    seat_of = [0] * n
    for subset in combinations(range(n), k):
        chosen = set(subset)
        rest = [p for p in range(n) if p not in chosen]
        for p, v in zip(rest, iso):
            agent_at[v] = p
            seat_of[p] = v
        for perm in permutations(subset):
            evaluated += 1
            for p, v in zip(perm, non):
                agent_at[v] = p
                seat_of[p] = v
            if problem == "mwa":
                val = sum(W[p][agent_at[v]] for p in perm for v in nbrs[seat_of[p]])
                if best_val is None or val > best_val:
                    best_val, best_at = val, list(agent_at)
            elif problem == "mua":
                utils = [sum(W[p][agent_at[v]] for v in nbrs[seat_of[p]]) for p in perm]
                val = min(utils)
                if rest:
                    val = min(val, 0)
                if best_val is None or val > best_val:
                    best_val, best_at = val, list(agent_at)
            elif problem == "efa":
                if fast_envy_free(W, nbrs, agent_at, seat_of):
                    found = list(agent_at)
                    break
            else:
                if fast_exchange_stable(W, nbrs, agent_at, seat_of):
                    found = list(agent_at)
                    break
        if found is not None:
            break

    if problem in ("mwa", "mua"):
        arr = Arrangement.from_agents_at(best_at)
        out = outcome_from_certificate(problem, inst, arr, "oracle", trials_run=evaluated)
        assert out.value == Fraction(best_val, inst.profile.scale)
        return out
    if found is None:
        return SolveOutcome(problem, "oracle", exists=False, trials_run=evaluated)
    arr = Arrangement.from_agents_at(found)
    return outcome_from_certificate(problem, inst, arr, "oracle", trials_run=evaluated)
