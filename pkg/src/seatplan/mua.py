"""Maxmin Utility Arrangement: polynomial cases, β-threshold DPs, and the k+Δ⁺ kernel."""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .colorcoding import (
    BudgetExceeded,
    colorful_bound,
    distinct_colorings,
    pinned_bound,
    trial_budget,
)
from .model import (
    Arrangement,
    Instance,
    automorphism_lower_bound,
    complete_arrangement,
    egalitarian,
)
from .mwa import by_color, seat_order, star_layout
from .oracle import (
    DispatchError,
    SolveOutcome,
    SolverConfig,
    UnsupportedScale,
    outcome_from_certificate,
    oracle_size,
    oracle_solve,
    trivial_outcome,
)

ALGORITHMS = ("oracle", "polynomial", "colorcoded_path_cycle", "colorcoded_stars", "kernel_kdelta")


def _isolated_exist(inst: Instance) -> bool:
    return inst.seat_analysis.k < inst.n


# β candidates ---------------------------------------------------------------------

def path_beta_candidates(inst: Instance) -> list[int]:
    """Scaled candidates: 0, every single value, every per-agent sum of two values."""
    W = inst.profile.scaled
    n = inst.n
    out = {0}
    for p in range(n):
        row = [W[p][q] for q in range(n) if q != p]
        out.update(row)
        for i in range(len(row)):
            for j in range(i + 1, len(row)):
                out.add(row[i] + row[j])
    if _isolated_exist(inst):
        out = {b for b in out if b <= 0}
    return sorted(out)


def single_values(inst: Instance) -> list[int]:
    W = inst.profile.scaled
    n = inst.n
    vals = {0}
    for p in range(n):
        for q in range(n):
            if p != q:
                vals.add(W[p][q])
    return sorted(vals)


def _leaf_pick(W, p, members, beta):
    """Greedy leaf of one color for center p: max s_p(q) among q with s_q(p) ≥ β."""
    best = None
    for q in members:
        if W[q][p] >= beta and (best is None or W[p][q] > W[p][best]):
            best = q
    return best


def star_beta_candidates(inst: Instance, colors, stars) -> list[int]:
    """0, single values, and greedy center totals at every single-value breakpoint."""
    W = inst.profile.scaled
    singles = single_values(inst)
    out = set(singles)
    groups = by_color(colors, inst.seat_analysis.k)
    for center_color, leaf_colors in stars:
        for p in groups[center_color]:
            for b in singles:
                total = 0
                for lc in leaf_colors:
                    q = _leaf_pick(W, p, groups[lc], b)
                    if q is None:
                        break
                    total += W[p][q]
                else:
                    out.add(total)
    if _isolated_exist(inst):
        out = {b for b in out if b <= 0}
    return sorted(out)


# feasibility per coloring ----------------------------------------------------------

def path_feasible(W, colors, groups, k: int, beta: int, cycle: bool):
    """Colorful agent sequence whose every member has utility ≥ β, or None.

    States are (mask, last, penultimate); an agent's utility is checked when
    it stops being last, since both its neighbors are known by then.  Cycles
    run once per color-0 start s and second agent r and check both at closing.
    """
    full = (1 << k) - 1
    if cycle:
        runs = [(s, [(s, r)]) for s in groups[0] for r in range(len(colors)) if colors[r] > 0]
    else:
        runs = [(None, [(q, p) for q in range(len(colors)) if colors[q] >= 0
                        for p in range(len(colors)) if colors[p] >= 0 and colors[p] != colors[q]
                        and W[q][p] >= beta])]
    for s, seeds in runs:
        table: list[dict] = [dict() for _ in range(full + 1)]
        for q, p in seeds:
            table[1 << colors[q] | 1 << colors[p]].setdefault((p, q), None)
        for mask in range(full):
            for (p, q) in table[mask]:
                need = beta - W[p][q]
                Wp = W[p]
                for c in range(k):
                    if mask >> c & 1:
                        continue
                    nxt = table[mask | 1 << c]
                    for x in groups[c]:
                        if Wp[x] >= need and (x, p) not in nxt:
                            nxt[(x, p)] = (p, q)
        for (p, q) in table[full]:
            if cycle:
                r = seeds[0][1]
                if W[p][q] + W[p][s] < beta or W[s][r] + W[s][p] < beta:
                    continue
            elif W[p][q] < beta:
                continue
            seq = [p]
            mask, key = full, (p, q)
            while True:
                prev = table[mask][key]
                if prev is None:
                    seq.append(key[1])
                    break
                mask &= ~(1 << colors[key[0]])
                key = prev
                seq.append(key[0])
            seq.reverse()
            return seq
    return None


def star_feasible(W, colors, groups, stars, beta: int):
    """Pinned assignment color -> agent with every placed utility ≥ β, or None."""
    chosen: dict[int, int] = {}
    for center_color, leaf_colors in stars:
        found = None
        for p in groups[center_color]:
            picks = []
            total = 0
            for lc in leaf_colors:
                q = _leaf_pick(W, p, groups[lc], beta)
                if q is None:
                    break
                picks.append(q)
                total += W[p][q]
            else:
                if total >= beta:
                    found = (p, picks)
                    break
        if found is None:
            return None
        chosen[center_color] = found[0]
        for lc, q in zip(leaf_colors, found[1]):
            chosen[lc] = q
    return chosen


def _largest_feasible(cands, test, floor_index: int):
    """Binary search for the largest feasible index above ``floor_index``; feasibility is monotone."""
    lo, hi = floor_index, len(cands) - 1
    if lo + 1 > hi or test(cands[lo + 1]) is None:
        return None
    lo += 1
    best = test(cands[lo])
    while lo < hi:
        mid = (lo + hi + 1) // 2
        r = test(cands[mid])
        if r is not None:
            lo, best = mid, r
        else:
            hi = mid - 1
    return lo, best


def feasibility_profile(inst: Instance, colors, candidates: Optional[list[int]] = None) -> list[bool]:
    """Feasibility of every candidate under one coloring; used to audit monotonicity."""
    a = inst.seat_analysis
    W = inst.profile.scaled
    groups = by_color(colors, a.k)
    if a.has("stars") and not (a.has("path") or a.has("cycle")):
        stars = _pinned_stars(inst)
        cands = candidates if candidates is not None else star_beta_candidates(inst, colors, stars)
        return [star_feasible(W, colors, groups, stars, b) is not None for b in cands]
    cycle = not a.has("path")
    cands = candidates if candidates is not None else path_beta_candidates(inst)
    return [path_feasible(W, colors, groups, a.k, b, cycle) is not None for b in cands]


def _pinned_stars(inst: Instance):
    color_of_seat = {v: i for i, v in enumerate(inst.seat_analysis.nonisolated)}
    return [(color_of_seat[c], [color_of_seat[v] for v in leaves]) for c, leaves in star_layout(inst)]


def _checked(inst: Instance, placed: dict, beta: int, algorithm: str) -> SolveOutcome:
    arr = complete_arrangement(inst.n, placed)
    value = egalitarian(inst, arr)
    if value != Fraction(beta, inst.profile.scale):
        raise AssertionError(f"{algorithm}: certificate egalitarian {value} differs from β")
    return SolveOutcome("mua", algorithm, value=value, certificate=arr)


def mua_colorcoded_path_cycle(inst: Instance, config: SolverConfig = SolverConfig()) -> SolveOutcome:
    a = inst.seat_analysis
    if not (a.has("path") or a.has("cycle")):
        raise DispatchError("colorcoded_path_cycle needs a path or cycle seat graph")
    k, n = a.k, inst.n
    cycle = not a.has("path")
    order = seat_order(inst)
    W = inst.profile.scaled
    cands = path_beta_candidates(inst)
    plan = trial_budget(colorful_bound(k), config.delta, config.max_trials)
    best_idx, best_seq = -1, None
    distinct = 0
    for trial, colors in distinct_colorings(n, k, config.seed, plan.trials):
        distinct += 1
        groups = by_color(colors, k)
        if any(not g for g in groups):
            continue
        r = _largest_feasible(cands, lambda b: path_feasible(W, colors, groups, k, b, cycle), best_idx)
        if r is not None:
            best_idx, best_seq = r
    if best_seq is None:
        out = trivial_outcome("mua", inst)
        out.algorithm = "colorcoded_path_cycle"
    else:
        out = _checked(inst, dict(zip(best_seq, order)), cands[best_idx], "colorcoded_path_cycle")
    out.trials_run, out.seed = plan.trials, config.seed
    out.extra = {"success_bound": plan.p, "distinct_colorings": distinct, "candidates": len(cands)}
    return out


def mua_colorcoded_stars(inst: Instance, config: SolverConfig = SolverConfig()) -> SolveOutcome:
    a = inst.seat_analysis
    if not a.has("stars"):
        raise DispatchError("colorcoded_stars needs a stars seat graph")
    k, n = a.k, inst.n
    W = inst.profile.scaled
    stars = _pinned_stars(inst)
    plan = trial_budget(pinned_bound(k, automorphism_lower_bound(inst)), config.delta, config.max_trials)
    best_val, best_pick = None, None
    distinct = 0
    for trial, colors in distinct_colorings(n, k, config.seed, plan.trials):
        distinct += 1
        groups = by_color(colors, k)
        cands = star_beta_candidates(inst, colors, stars)
        floor = -1 if best_val is None else bisect_right(cands, best_val) - 1
        r = _largest_feasible(cands, lambda b: star_feasible(W, colors, groups, stars, b), floor)
        if r is not None:
            best_val, best_pick = cands[r[0]], r[1]
    if best_pick is None:
        out = trivial_outcome("mua", inst)
        out.algorithm = "colorcoded_stars"
    else:
        placed = {p: a.nonisolated[c] for c, p in best_pick.items()}
        out = _checked(inst, placed, best_val, "colorcoded_stars")
    out.trials_run, out.seed = plan.trials, config.seed
    out.extra = {"success_bound": plan.p, "distinct_colorings": distinct}
    return out


# polynomial cases and kernel --------------------------------------------------------

def mua_polynomial_cases(inst: Instance, config: SolverConfig = SolverConfig()) -> Optional[SolveOutcome]:
    """Non-negative preferences; None when not applicable."""
    if not inst.preference_analysis.nonnegative:
        return None
    a = inst.seat_analysis
    if a.k == 0:
        return trivial_outcome("mua", inst)
    if _isolated_exist(inst) or a.has("clique"):
        # an isolated agent pins the minimum at 0; on a clique every arrangement is equivalent
        return outcome_from_certificate("mua", inst, Arrangement.identity(inst.n), "polynomial")
    out = oracle_solve("mua", inst, config.oracle_cap)
    out.algorithm = "polynomial"
    return out


def independent_agents(inst: Instance, k: int) -> list[int]:
    """Greedy: take a minimum in-degree agent, drop its in- and out-neighbors, repeat.

    Stops at k agents.  Ties go to the lowest index.
    """
    alive = set(range(inst.n))
    outs = inst.profile.out_neighbors
    ins = inst.profile.in_neighbors
    chosen = []
    while alive and len(chosen) < k:
        p = min(alive, key=lambda x: (sum(1 for y in ins[x] if y in alive), x))
        chosen.append(p)
        alive.discard(p)
        alive.difference_update(ins[p])
        alive.difference_update(outs[p])
    return chosen


@dataclass(frozen=True)
class KernelResult:
    certificate: Optional[Arrangement] = None
    reduced: Optional[Instance] = None
    mapping: Optional[tuple[int, ...]] = None  # reduced agent -> original agent
    independent: tuple[int, ...] = ()

    @property
    def solved(self) -> bool:
        return self.certificate is not None


def kernelize(inst: Instance) -> KernelResult:
    """Shared by MUA and ESA.

    If the greedy finds k mutually indifferent agents they go on the
    non-isolated seats.  Otherwise the instance already has fewer than
    k(1+2Δ⁺) agents and is its own kernel.
    """
    a = inst.seat_analysis
    S = independent_agents(inst, a.k)
    if len(S) == a.k:
        placed = dict(zip(sorted(S), a.nonisolated))
        return KernelResult(certificate=complete_arrangement(inst.n, placed), independent=tuple(S))
    return KernelResult(reduced=inst, mapping=tuple(range(inst.n)), independent=tuple(S))


def mua_kernelize_kdelta(inst: Instance) -> KernelResult:
    if not _isolated_exist(inst):
        raise DispatchError("kernel_kdelta needs at least one isolated seat")
    return kernelize(inst)


def mua_kernel_solve(inst: Instance, config: SolverConfig = SolverConfig()) -> SolveOutcome:
    kr = mua_kernelize_kdelta(inst)
    if kr.solved:
        out = outcome_from_certificate("mua", inst, kr.certificate, "kernel_kdelta")
        assert out.value == 0
    else:
        sub = oracle_solve("mua", kr.reduced, config.oracle_cap)
        arr = Arrangement(tuple(sub.certificate[kr.mapping.index(p)] for p in range(inst.n)))
        out = outcome_from_certificate("mua", inst, arr, "kernel_kdelta", trials_run=sub.trials_run)
        out.extra = {"kernel_size": kr.reduced.n}
    out.seed = config.seed
    return out


# dispatch ------------------------------------------------------------------------------

def _fits(p: float, config: SolverConfig) -> bool:
    try:
        trial_budget(p, config.delta, config.max_trials)
    except BudgetExceeded:
        return False
    return True


def mua_select(inst: Instance, config: SolverConfig = SolverConfig()) -> str:
    a = inst.seat_analysis
    k = a.k
    if k == 0:
        return "trivial"
    size = oracle_size(inst.n, k)
    if size <= config.tiny:
        return "oracle"
    if inst.preference_analysis.nonnegative:
        return "polynomial"
    if _isolated_exist(inst) and kernelize(inst).solved:
        return "kernel_kdelta"
    if a.has("stars") and _fits(pinned_bound(k, automorphism_lower_bound(inst)), config):
        return "colorcoded_stars"
    if (a.has("path") or a.has("cycle")) and _fits(colorful_bound(k), config):
        return "colorcoded_path_cycle"
    if size <= config.oracle_cap:
        return "kernel_kdelta" if _isolated_exist(inst) else "oracle"
    raise UnsupportedScale(f"no MUA solver applies within resource caps (n={inst.n}, k={k})")


def _polynomial(inst: Instance, config: SolverConfig) -> SolveOutcome:
    out = mua_polynomial_cases(inst, config)
    if out is None:
        raise DispatchError("polynomial case needs non-negative preferences")
    return out


SOLVERS: dict[str, Callable[[Instance, SolverConfig], SolveOutcome]] = {
    "polynomial": _polynomial,
    "colorcoded_path_cycle": mua_colorcoded_path_cycle,
    "colorcoded_stars": mua_colorcoded_stars,
    "kernel_kdelta": mua_kernel_solve,
}


def mua_solve(inst: Instance, config: SolverConfig = SolverConfig()) -> SolveOutcome:
    algo = config.algorithm
    if algo == "auto":
        algo = mua_select(inst, config)
    if algo == "trivial":
        return trivial_outcome("mua", inst)
    if algo == "oracle":
        out = oracle_solve("mua", inst, config.oracle_cap)
        out.seed = config.seed
        return out
    if algo not in SOLVERS:
        raise DispatchError(f"unknown MUA algorithm {algo!r}; choose from {', '.join(ALGORITHMS)}")
    return SOLVERS[algo](inst, config)
