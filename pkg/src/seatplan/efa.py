"""Envy-free arrangement deciders."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Optional

from .colorcoding import (
    BudgetExceeded,
    distinct_colorings,
    pinned_bound,
    separation_bound,
    trial_budget,
)
from .model import Arrangement, Instance, automorphism_lower_bound, complete_arrangement
from .oracle import (
    DispatchError,
    ResourceError,
    SolveOutcome,
    SolverConfig,
    UnsupportedScale,
    fast_envy_free,
    oracle_size,
    oracle_solve,
    outcome_from_certificate,
    trivial_outcome,
)

ALGORITHMS = ("oracle", "clique_nonneg_symmetric", "nonneg_kdelta", "matching_kdelta")


class PartitionCapExceeded(ResourceError):
    pass


def _envy_free(inst: Instance, arr: Arrangement) -> bool:
    return fast_envy_free(inst.profile.scaled, inst.seats.neighbors, arr.agent_at, arr.assignment)


def _validated(inst: Instance, arr: Arrangement, algorithm: str, **kw) -> SolveOutcome:
    if not _envy_free(inst, arr):
        raise AssertionError(f"{algorithm}: certificate is not envy-free")
    return outcome_from_certificate("efa", inst, arr, algorithm, **kw)


def _no(algorithm: str, **kw) -> SolveOutcome:
    return SolveOutcome("efa", algorithm, exists=False, **kw)


@dataclass(frozen=True)
class Component:
    agents: tuple[int, ...]
    mask: int = 0  # color set, when colored

    def __len__(self):
        return len(self.agents)


def weak_components(n: int, arcs, keep=None) -> list[tuple[int, ...]]:
    """Weakly connected components of the digraph ``arcs`` restricted to ``keep``."""
    adj = [[] for _ in range(n)]
    for p, q in arcs:
        adj[p].append(q)
        adj[q].append(p)
    seen = set()
    out = []
    for s in range(n):
        if s in seen or (keep is not None and not keep(s)):
            continue
        comp, stack = [], [s]
        seen.add(s)
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in adj[u]:
                if w not in seen and (keep is None or keep(w)):
                    seen.add(w)
                    stack.append(w)
        out.append(tuple(sorted(comp)))
    return out


# clique, non-negative, symmetric ---------------------------------------------

def component_catalog(inst: Instance) -> list[Component]:
    return [Component(c) for c in weak_components(inst.n, inst.profile.arcs)]


def subset_sum(sizes: list[int], target: int) -> Optional[list[int]]:
    """Indices of items whose sizes sum to ``target``; later items are skipped when possible."""
    reach: list[Optional[tuple]] = [None] * (target + 1)
    reach[0] = ()
    for i, s in enumerate(sizes):
        for t in range(target, s - 1, -1):
            if reach[t] is None and reach[t - s] is not None:
                reach[t] = (i, t - s)
    if reach[target] is None:
        return None
    picked, t = [], target
    while t:
        i, prev = reach[t]
        picked.append(i)
        t = prev
    return sorted(picked)


def efa_clique_nonneg_symmetric(inst: Instance, config: SolverConfig = SolverConfig()) -> SolveOutcome:
    a, pa = inst.seat_analysis, inst.preference_analysis
    if a.k == 0:
        return trivial_outcome("efa", inst)
    if not (a.has("clique") and pa.nonnegative and pa.symmetric):
        raise DispatchError("clique_nonneg_symmetric needs a clique, non-negative symmetric preferences")
    comps = component_catalog(inst)
    picked = subset_sum([len(c) for c in comps], a.k)
    if picked is None:
        return _no("clique_nonneg_symmetric", seed=config.seed)
    agents = sorted(p for i in picked for p in comps[i].agents)
    arr = complete_arrangement(inst.n, dict(zip(agents, a.nonisolated)))
    return _validated(inst, arr, "clique_nonneg_symmetric", seed=config.seed)


# non-negative, random separation ---------------------------------------------------

def _color_mask(agents, colors) -> Optional[int]:
    m = 0
    for p in agents:
        bit = 1 << colors[p]
        if m & bit:
            return None
        m |= bit
    return m


def _has_outside_in_arcs(inst: Instance, members: set, positive_only: bool) -> bool:
    W = inst.profile.scaled
    ins = inst.profile.in_neighbors
    for q in members:
        for p in ins[q]:
            if p not in members and (not positive_only or W[p][q] > 0):
                return True
    return False


def _internally_envy_free(inst: Instance, comp, colors, seat_of_color) -> bool:
    """No member envies any non-isolated seat, counting only preferences inside the component."""
    W = inst.profile.scaled
    seats = inst.seats
    k = len(seat_of_color)
    by_color = {colors[p]: p for p in comp}
    for p in comp:
        sp = seat_of_color[colors[p]]
        u = sum(W[p][x] for x in comp if x != p and seats.adjacent(sp, seat_of_color[colors[x]]))
        for j in range(k):
            if j == colors[p]:
                continue
            tj = seat_of_color[j]
            y = by_color.get(j)
            new = 0
            for x in comp:
                if x != p and x != y and seats.adjacent(tj, seat_of_color[colors[x]]):
                    new += W[p][x]
            if y is not None and seats.adjacent(sp, tj):
                new += W[p][y]
            if new > u:
                return False
    return True


def tile_exact(masks: list[int], k: int) -> Optional[list[int]]:
    """First selection (by insertion order of reachable masks) of disjoint masks covering [k]."""
    full = (1 << k) - 1
    reach: dict[int, Optional[tuple]] = {0: None}
    for i, cm in enumerate(masks):
        for mask in list(reach):
            if mask & cm == 0 and (mask | cm) not in reach:
                reach[mask | cm] = (i, mask)
    if full not in reach:
        return None
    picked, mask = [], full
    while mask:
        i, mask = reach[mask]
        picked.append(i)
    return sorted(picked)


def efa_nonneg_kdelta(inst: Instance, config: SolverConfig = SolverConfig()) -> SolveOutcome:
    pa, a = inst.preference_analysis, inst.seat_analysis
    if not pa.nonnegative:
        raise DispatchError("nonneg_kdelta needs non-negative preferences")
    k, n = a.k, inst.n
    if k == 0:
        return trivial_outcome("efa", inst)
    seat_of_color = a.nonisolated
    arcs = inst.profile.arcs
    p_sep = separation_bound(k, pa.delta_plus)
    plan = trial_budget(p_sep * pinned_bound(k, automorphism_lower_bound(inst)), config.delta, config.max_trials)
    distinct = 0
    for trial, colors in distinct_colorings(n, k, config.seed, plan.trials, separation=True):
        distinct += 1
        masks, members = [], []
        for comp in weak_components(n, arcs, keep=lambda p: colors[p] >= 0):
            cm = _color_mask(comp, colors)
            if cm is None:
                continue
            if _has_outside_in_arcs(inst, set(comp), positive_only=False):
                continue
            if not _internally_envy_free(inst, comp, colors, seat_of_color):
                continue
            masks.append(cm)
            members.append(comp)
        picked = tile_exact(masks, k)
        if picked is None:
            continue
        placed = {p: seat_of_color[colors[p]] for i in picked for p in members[i]}
        arr = complete_arrangement(n, placed)
        if _envy_free(inst, arr):
            out = _validated(inst, arr, "nonneg_kdelta", trials_run=trial + 1, seed=config.seed)
            out.extra = {"success_bound": plan.p, "distinct_colorings": distinct}
            return out
    out = _no("nonneg_kdelta", trials_run=plan.trials, seed=config.seed)
    out.extra = {"success_bound": plan.p, "distinct_colorings": distinct}
    return out


# matching graphs --------------------------------------------------------------------

def matching_color_seats(inst: Instance) -> list[int]:
    """Seat per color: edge ℓ (edges sorted by lower endpoint) owns colors 2ℓ and 2ℓ+1."""
    out = []
    for u, v in inst.seats.sorted_edges():
        out.extend((u, v))
    return out


def set_partitions(k: int) -> Iterator[list[int]]:
    """Partitions of range(k) as block masks, restricted-growth strings in lex order."""
    if k == 0:
        yield []
        return
    rgs = [0] * k

    def blocks():
        out = [0] * (max(rgs) + 1)
        for i, b in enumerate(rgs):
            out[b] |= 1 << i
        return out

    while True:
        yield blocks()
        # next restricted-growth string
        i = k - 1
        while i > 0:
            if rgs[i] <= max(rgs[:i]):
                rgs[i] += 1
                for j in range(i + 1, k):
                    rgs[j] = 0
                break
            i -= 1
        else:
            return


def multicolored_independent_set(nodes: list[int], block_of: dict, conflicts: dict, blocks: int):
    """Pick one node per block with no conflicts, by min-degree branching.

    ``conflicts`` maps a node to the set of nodes it conflicts with (symmetric).
    Returns the chosen nodes or None.
    """

    def rec(alive: frozenset, open_blocks: frozenset):
        if not open_blocks:
            return []
        if any(not any(block_of[x] == b for x in alive) for b in open_blocks):
            return None
        v = min(alive, key=lambda x: (len(conflicts[x] & alive), x))
        for u in [v] + sorted(conflicts[v] & alive):
            b = block_of[u]
            rest = frozenset(x for x in alive if x != u and x not in conflicts[u] and block_of[x] != b)
            r = rec(rest, open_blocks - {b})
            if r is not None:
                return [u] + r
        return None

    return rec(frozenset(nodes), frozenset(range(blocks)))


def _best_match_ok(W, comp, colors, agent_of_color) -> bool:
    members = set(comp)
    for p in comp:
        partner = agent_of_color.get(colors[p] ^ 1)
        inside = [W[p][r] for r in comp if r != p]
        if partner is not None and partner in members:
            w = W[p][partner]
            if w < 0 or any(x > w for x in inside):
                return False
        elif any(x > 0 for x in inside):
            return False
    return True


def efa_matching_kdelta(inst: Instance, config: SolverConfig = SolverConfig()) -> SolveOutcome:
    a = inst.seat_analysis
    if not a.has("matching"):
        raise DispatchError("matching_kdelta needs a matching seat graph")
    k, n = a.k, inst.n
    if k == 0:
        return trivial_outcome("efa", inst)
    if k > config.max_partition_k:
        raise PartitionCapExceeded(
            f"matching_kdelta enumerates partitions of {k} seats; cap is {config.max_partition_k}"
        )
    if n == k:
        # no isolated seat: the instance is its own linear kernel
        out = oracle_solve("efa", inst, config.oracle_cap)
        out.algorithm, out.seed = "matching_kdelta", config.seed
        return out
    W = inst.profile.scaled
    pos_arcs = [(p, q) for (p, q) in inst.profile.arcs if W[p][q] > 0]
    pos_out = [0] * n
    for p, _ in pos_arcs:
        pos_out[p] += 1
    d_pos = max(pos_out, default=0)
    seat_of_color = matching_color_seats(inst)
    plan = trial_budget(
        separation_bound(k, d_pos) * pinned_bound(k, automorphism_lower_bound(inst)),
        config.delta,
        config.max_trials,
    )
    partitions = list(set_partitions(k))
    distinct = 0
    for trial, colors in distinct_colorings(n, k, config.seed, plan.trials, separation=True):
        distinct += 1
        comps = []
        for comp in weak_components(n, pos_arcs, keep=lambda p: colors[p] >= 0):
            cm = _color_mask(comp, colors)
            if cm is None or _has_outside_in_arcs(inst, set(comp), positive_only=True):
                continue
            agent_of_color = {colors[p]: p for p in comp}
            if _best_match_ok(W, comp, colors, agent_of_color):
                comps.append(Component(comp, cm))
        if not comps:
            continue
        by_mask: dict[int, list[int]] = {}
        for i, c in enumerate(comps):
            by_mask.setdefault(c.mask, []).append(i)
        conflicts = {i: set() for i in range(len(comps))}
        for i, ci in enumerate(comps):
            for j in range(i + 1, len(comps)):
                cj = comps[j]
                if ci.mask & cj.mask:
                    continue
                for p in ci.agents:
                    for q in cj.agents:
                        if colors[p] ^ 1 == colors[q] and (W[p][q] < 0 or W[q][p] < 0):
                            conflicts[i].add(j)
                            conflicts[j].add(i)
        for blocks in partitions:
            if any(b not in by_mask for b in blocks):
                continue
            nodes = [i for b in blocks for i in by_mask[b]]
            block_of = {i: blocks.index(comps[i].mask) for i in nodes}
            sel = multicolored_independent_set(nodes, block_of, conflicts, len(blocks))
            if sel is None:
                continue
            placed = {p: seat_of_color[colors[p]] for i in sel for p in comps[i].agents}
            arr = complete_arrangement(n, placed)
            if _envy_free(inst, arr):
                out = _validated(inst, arr, "matching_kdelta", trials_run=trial + 1, seed=config.seed)
                out.extra = {"success_bound": plan.p, "distinct_colorings": distinct}
                return out
    out = _no("matching_kdelta", trials_run=plan.trials, seed=config.seed)
    out.extra = {"success_bound": plan.p, "distinct_colorings": distinct}
    return out


# dispatch ------------------------------------------------------------------------------

def _fits(inst: Instance, config: SolverConfig, positive_only: bool) -> bool:
    k = inst.seat_analysis.k
    if positive_only:
        W = inst.profile.scaled
        d = max((sum(1 for q in range(inst.n) if W[p][q] > 0) for p in range(inst.n)), default=0)
    else:
        d = inst.preference_analysis.delta_plus
    try:
        trial_budget(separation_bound(k, d) * pinned_bound(k, automorphism_lower_bound(inst)),
                     config.delta, config.max_trials)
    except BudgetExceeded:
        return False
    return True


def efa_select(inst: Instance, config: SolverConfig = SolverConfig()) -> str:
    a, pa = inst.seat_analysis, inst.preference_analysis
    k = a.k
    if k == 0:
        return "trivial"
    size = oracle_size(inst.n, k)
    if size <= config.tiny:
        return "oracle"
    if a.has("clique") and pa.nonnegative and pa.symmetric:
        return "clique_nonneg_symmetric"
    if pa.nonnegative and _fits(inst, config, positive_only=False):
        return "nonneg_kdelta"
    if a.has("matching") and k <= config.max_partition_k and (
        inst.n == k and size <= config.oracle_cap or inst.n > k and _fits(inst, config, positive_only=True)
    ):
        return "matching_kdelta"
    if size <= config.oracle_cap:
        return "oracle"
    raise UnsupportedScale(f"no EFA solver applies within resource caps (n={inst.n}, k={k})")


SOLVERS: dict[str, Callable[[Instance, SolverConfig], SolveOutcome]] = {
    "clique_nonneg_symmetric": efa_clique_nonneg_symmetric,
    "nonneg_kdelta": efa_nonneg_kdelta,
    "matching_kdelta": efa_matching_kdelta,
}


def efa_solve(inst: Instance, config: SolverConfig = SolverConfig()) -> SolveOutcome:
    algo = config.algorithm
    if algo == "auto":
        algo = efa_select(inst, config)
    if algo == "trivial":
        return trivial_outcome("efa", inst)
    if algo == "oracle":
        out = oracle_solve("efa", inst, config.oracle_cap)
        out.seed = config.seed
        return out
    if algo not in SOLVERS:
        raise DispatchError(f"unknown EFA algorithm {algo!r}; choose from {', '.join(ALGORITHMS)}")
    return SOLVERS[algo](inst, config)
