"""Max Welfare Arrangement: color-coding DPs and random separation."""

from __future__ import annotations

from fractions import Fraction
from itertools import islice
from typing import Callable, Optional

import numpy as np

from .colorcoding import (
    BudgetExceeded,
    TrialPlan,
    colorful_bound,
    distinct_colorings,
    pinned_bound,
    separation_bound,
    trial_budget,
)
from .model import Instance, automorphism_lower_bound, complete_arrangement, welfare
from .oracle import (
    DispatchError,
    OracleTooLarge,
    SolveOutcome,
    SolverConfig,
    UnsupportedScale,
    oracle_size,
    oracle_solve,
    trivial_outcome,
)

ALGORITHMS = ("oracle", "colorcoded_path_cycle", "colorcoded_stars", "symmetric_kdelta")


def seat_order(inst: Instance) -> list[int]:
    """Non-isolated seats in walk order, from the lowest endpoint (path) or lowest seat (cycle)."""
    a = inst.seat_analysis
    nbrs = inst.seats.neighbors
    if a.has("path"):
        start = min(v for v in a.nonisolated if len(nbrs[v]) == 1)
    elif a.has("cycle"):
        start = a.nonisolated[0]
    else:
        raise DispatchError("seat graph is neither a path nor a cycle")
    order = [start]
    seen = {start}
    while len(order) < a.k:
        order.append(min(v for v in nbrs[order[-1]] if v not in seen))
        seen.add(order[-1])
    return order


def star_layout(inst: Instance) -> list[tuple[int, list[int]]]:
    """(center seat, leaf seats) per star; a lone edge is centered on its lower seat."""
    nbrs = inst.seats.neighbors
    out = []
    for comp in inst.seat_analysis.components:
        center = max(comp, key=lambda v: (len(nbrs[v]), -v))
        out.append((center, [v for v in comp if v != center]))
    return out


def pair_matrix(inst: Instance) -> list[list[int]]:
    W = inst.profile.scaled
    n = inst.n
    return [[W[p][q] + W[q][p] for q in range(n)] for p in range(n)]


def by_color(colors, k: int) -> list[list[int]]:
    groups = [[] for _ in range(k)]
    for p, c in enumerate(colors):
        if c >= 0:
            groups[c].append(p)
    return groups


def _checked(inst: Instance, placed: dict, best_scaled: int, algorithm: str, **kw) -> SolveOutcome:
    arr = complete_arrangement(inst.n, placed)
    value = welfare(inst, arr)
    if value != Fraction(best_scaled, inst.profile.scale):
        raise AssertionError(f"{algorithm}: certificate welfare {value} differs from DP value")
    return SolveOutcome("mwa", algorithm, value=value, certificate=arr, **kw)


def _plan(p: float, config: SolverConfig) -> TrialPlan:
    return trial_budget(p, config.delta, config.max_trials)


def _stats(plan: TrialPlan, distinct: int) -> dict:
    return {"success_bound": plan.p, "distinct_colorings": distinct}


# path / cycle -----------------------------------------------------------------

def colorful_path(P, colors, groups, k: int, start: Optional[int] = None):
    """Heaviest sequence using every color once, scored by consecutive ``P`` entries.

    Returns ``(value, sequence)`` or None.  With ``start`` the sequence begins
    at that agent and the closing term ``P[last][start]`` is added.
    """
    full = (1 << k) - 1
    table: list[dict] = [dict() for _ in range(1 << k)]
    if start is None:
        for c in range(k):
            for p in groups[c]:
                table[1 << c][p] = (0, None)
    else:
        table[1 << colors[start]][start] = (0, None)
    for mask in range(1, full):
        row = table[mask]
        if not row:
            continue
        for p in sorted(row):
            val = row[p][0]
            Pp = P[p]
            for c in range(k):
                if mask >> c & 1:
                    continue
                nxt = table[mask | 1 << c]
                for x in groups[c]:
                    v = val + Pp[x]
                    cur = nxt.get(x)
                    if cur is None or v > cur[0]:
                        nxt[x] = (v, p)
    best = None
    for p in sorted(table[full]):
        v = table[full][p][0] + (P[p][start] if start is not None else 0)
        if best is None or v > best[0]:
            best = (v, p)
    if best is None:
        return None
    seq = [best[1]]
    mask = full
    while True:
        prev = table[mask][seq[-1]][1]
        if prev is None:
            break
        mask &= ~(1 << colors[seq[-1]])
        seq.append(prev)
    seq.reverse()
    return best[0], seq


# sentinel for unreachable DP cells; real values stay far above NEG // 2
NEG = -(1 << 62)
_INT_LIMIT = 1 << 60


def colorful_path_batch(P, colors, k: int, starts=None):
    """``colorful_path`` over a batch of colorings at once.

    ``colors`` is a ``(B, n)`` array and ``starts`` an optional length-``B``
    array of walk starts.  Returns ``(values, rebuild)``: the best value per
    row (``NEG`` when no colorful sequence exists) and ``rebuild(row)``
    giving that row's sequence.  Ties go to the lowest agent, as in the
    scalar DP.
    """
    P = np.asarray(P, dtype=np.int64)
    colors = np.asarray(colors, dtype=np.int64)
    B, n = colors.shape
    full = (1 << k) - 1
    bits = np.left_shift(1, colors)
    rows = np.arange(B)[:, None]
    val = np.full((full + 1, B, n), NEG, dtype=np.int64)
    arg = np.zeros((full + 1, B, n), dtype=np.int32)
    if starts is None:
        val[bits, rows, np.arange(n)] = 0
    else:
        starts = np.asarray(starts, dtype=np.int64)
        val[1, np.arange(B), starts] = 0
    PT = P.T
    for mask in range(3, full + 1):
        if mask & (mask - 1) == 0:
            continue
        inside = (bits & mask) != 0
        # row 0 is all NEG, so agents outside the mask pull nothing
        prev = np.where(inside, mask ^ bits, 0)
        cand = val[prev, rows, :] + PT
        best = cand.argmax(axis=2)
        v = np.take_along_axis(cand, best[..., None], axis=2)[..., 0]
        val[mask] = np.where(inside & (v > NEG // 2), v, NEG)
        arg[mask] = best
    final = val[full]
    if starts is not None:
        final = np.where(final > NEG // 2, final + P[:, starts].T, NEG)
    ends = final.argmax(axis=1)
    values = final[np.arange(B), ends]

    def rebuild(row: int) -> list[int]:
        p = int(ends[row])
        seq, mask = [p], full
        while mask & (mask - 1):
            prev = int(arg[mask, row, p])
            mask ^= int(bits[row, p])
            p = prev
            seq.append(p)
        seq.reverse()
        return seq

    return values, rebuild


def _batch_rows(n: int, k: int) -> int:
    """Rows per batch: keep the gather near 2^17 cells and the tables under ~64 MB."""
    by_gather = (1 << 17) // max(1, n * n)
    by_memory = (1 << 22) // max(1, (1 << k) * n)
    return max(1, min(256, by_gather, by_memory))


def _path_cycle_items(trials, k: int, cycle: bool):
    """(trial, colors, start) rows; cycles get one row per color-0 agent."""
    for trial, colors in trials:
        groups = by_color(colors, k)
        if any(not g for g in groups):
            continue
        for s in (groups[0] if cycle else [None]):
            yield trial, colors, s


def _best_path_cycle(P, k: int, cycle: bool, trials):
    """Best ``(value, sequence, trial)`` over the trials; the first row wins ties."""
    best = None
    items = _path_cycle_items(trials, k, cycle)
    if max((abs(x) for row in P for x in row), default=0) * (k + 1) >= _INT_LIMIT:
        # too wide for int64: exact Python integers
        for trial, colors, s in items:
            r = colorful_path(P, colors, by_color(colors, k), k, start=s)
            if r is not None and (best is None or r[0] > best[0]):
                best = (r[0], r[1], trial)
        return best
    size = _batch_rows(len(P), k)
    while chunk := list(islice(items, size)):
        colors = np.array([c for _, c, _ in chunk], dtype=np.int64)
        starts = np.array([s for _, _, s in chunk]) if cycle else None
        values, rebuild = colorful_path_batch(P, colors, k, starts)
        row = int(values.argmax())
        v = int(values[row])
        if v > NEG // 2 and (best is None or v > best[0]):
            best = (v, rebuild(row), chunk[row][0])
    return best


def mwa_colorcoded_path_cycle(inst: Instance, config: SolverConfig = SolverConfig()) -> SolveOutcome:
    a = inst.seat_analysis
    if not (a.has("path") or a.has("cycle")):
        raise DispatchError("colorcoded_path_cycle needs a path or cycle seat graph")
    k, n = a.k, inst.n
    cycle = not a.has("path")
    order = seat_order(inst)
    P = pair_matrix(inst)
    plan = _plan(colorful_bound(k), config)
    distinct = 0

    def counted():
        nonlocal distinct
        for item in distinct_colorings(n, k, config.seed, plan.trials):
            distinct += 1
            yield item

    best = _best_path_cycle(P, k, cycle, counted())
    if best is None:
        out = trivial_outcome("mwa", inst)
        out.algorithm = "colorcoded_path_cycle"
    else:
        placed = dict(zip(best[1], order))
        out = _checked(inst, placed, best[0], "colorcoded_path_cycle")
    out.trials_run, out.seed = plan.trials, config.seed
    out.extra = _stats(plan, distinct)
    out.extra["best_trial"] = best[2] if best else None
    return out


# stars --------------------------------------------------------------------------

def mwa_colorcoded_stars(inst: Instance, config: SolverConfig = SolverConfig()) -> SolveOutcome:
    """Colors are seats: color ``i`` belongs to the ``i``-th non-isolated seat."""
    a = inst.seat_analysis
    if not a.has("stars"):
        raise DispatchError("colorcoded_stars needs a stars seat graph")
    k, n = a.k, inst.n
    color_of_seat = {v: i for i, v in enumerate(a.nonisolated)}
    stars = [(color_of_seat[c], [color_of_seat[v] for v in leaves]) for c, leaves in star_layout(inst)]
    P = pair_matrix(inst)
    plan = _plan(pinned_bound(k, automorphism_lower_bound(inst)), config)
    best, best_trial = None, None
    distinct = 0
    for trial, colors in distinct_colorings(n, k, config.seed, plan.trials):
        distinct += 1
        groups = by_color(colors, k)
        total = 0
        chosen: dict[int, int] = {}
        for center_color, leaf_colors in stars:
            star_best = None
            for p in groups[center_color]:
                s = 0
                picks = []
                for lc in leaf_colors:
                    if not groups[lc]:
                        break
                    q = max(groups[lc], key=lambda x: (P[p][x], -x))
                    s += P[p][q]
                    picks.append(q)
                else:
                    if star_best is None or s > star_best[0]:
                        star_best = (s, p, picks)
            if star_best is None:
                total = None
                break
            total += star_best[0]
            chosen[star_best[1]] = center_color
            for q, lc in zip(star_best[2], leaf_colors):
                chosen[q] = lc
        if total is not None and (best is None or total > best[0]):
            best, best_trial = (total, chosen), trial
    if best is None:
        out = trivial_outcome("mwa", inst)
        out.algorithm = "colorcoded_stars"
    else:
        placed = {p: a.nonisolated[c] for p, c in best[1].items()}
        out = _checked(inst, placed, best[0], "colorcoded_stars")
    out.trials_run, out.seed = plan.trials, config.seed
    out.extra = _stats(plan, distinct)
    out.extra["best_trial"] = best_trial
    return out


# symmetric, random separation -------------------------------------------------

def red_components(adj, colors) -> list[list[int]]:
    """Connected components among agents with a non-negative color, in order of lowest member."""
    seen = set()
    comps = []
    for p, c in enumerate(colors):
        if c < 0 or p in seen:
            continue
        comp, stack = [], [p]
        seen.add(p)
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in adj[u]:
                if colors[w] >= 0 and w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def tile_colors(items, k: int):
    """0/1 selection of ``(mask, value)`` items whose masks partition all k colors.

    Maximizes the value sum; on ties an item is left out.  Returns
    ``(value, [indices])`` or None.
    """
    full = (1 << k) - 1
    table: dict[int, tuple] = {0: (0, None)}
    for i, (cm, val) in enumerate(items):
        new = dict(table)
        for mask, (v, link) in table.items():
            if mask & cm:
                continue
            nm = mask | cm
            cand = v + val
            cur = new.get(nm)
            if cur is None or cand > cur[0]:
                new[nm] = (cand, (i, link))
        table = new
    if full not in table:
        return None
    value, link = table[full]
    picked = []
    while link is not None:
        picked.append(link[0])
        link = link[1]
    return value, sorted(picked)


def mwa_symmetric_kdelta(inst: Instance, config: SolverConfig = SolverConfig()) -> SolveOutcome:
    pa = inst.preference_analysis
    if not pa.symmetric:
        raise DispatchError("symmetric_kdelta needs symmetric preferences")
    a = inst.seat_analysis
    k, n = a.k, inst.n
    if k == 0:
        return trivial_outcome("mwa", inst)
    seat_of_color = a.nonisolated
    seats = inst.seats
    W = inst.profile.scaled
    adj = inst.profile.out_neighbors
    p_sep = separation_bound(k, pa.delta_plus)
    plan = _plan(p_sep * pinned_bound(k, automorphism_lower_bound(inst)), config)
    best, best_trial = None, None
    distinct = 0
    for trial, colors in distinct_colorings(n, k, config.seed, plan.trials, separation=True):
        distinct += 1
        items, members = [], []
        for comp in red_components(adj, colors):
            cm = 0
            for p in comp:
                cm |= 1 << colors[p]
            if bin(cm).count("1") != len(comp):
                continue
            val = 0
            for p in comp:
                sp = seat_of_color[colors[p]]
                for q in adj[p]:
                    if colors[q] >= 0 and seats.adjacent(sp, seat_of_color[colors[q]]):
                        val += W[p][q]
            items.append((cm, val))
            members.append(comp)
        r = tile_colors(items, k)
        if r is not None and (best is None or r[0] > best[0]):
            best = (r[0], {p: seat_of_color[colors[p]] for i in r[1] for p in members[i]})
            best_trial = trial
    if best is None:
        out = trivial_outcome("mwa", inst)
        out.algorithm = "symmetric_kdelta"
    else:
        out = _checked(inst, best[1], best[0], "symmetric_kdelta")
    out.trials_run, out.seed = plan.trials, config.seed
    out.extra = _stats(plan, distinct)
    out.extra["best_trial"] = best_trial
    return out


# dispatch ------------------------------------------------------------------------

def _budget_fits(p: float, config: SolverConfig) -> bool:
    try:
        _plan(p, config)
    except BudgetExceeded:
        return False
    return True


def mwa_candidates(inst: Instance, config: SolverConfig) -> list[str]:
    """Specialized solvers whose preconditions and trial budgets hold, cheapest first."""
    a = inst.seat_analysis
    k = a.k
    out = []
    if a.has("stars") and _budget_fits(pinned_bound(k, automorphism_lower_bound(inst)), config):
        out.append("colorcoded_stars")
    if (a.has("path") or a.has("cycle")) and _budget_fits(colorful_bound(k), config):
        out.append("colorcoded_path_cycle")
    pa = inst.preference_analysis
    if pa.symmetric:
        p = separation_bound(k, pa.delta_plus) * pinned_bound(k, automorphism_lower_bound(inst))
        if _budget_fits(p, config):
            out.append("symmetric_kdelta")
    return out


def mwa_select(inst: Instance, config: SolverConfig = SolverConfig()) -> str:
    """Name of the solver ``mwa_solve`` would run under ``algorithm="auto"``."""
    k = inst.seat_analysis.k
    if k == 0:
        return "trivial"
    size = oracle_size(inst.n, k)
    if size <= config.tiny:
        return "oracle"
    cands = mwa_candidates(inst, config)
    if cands:
        return cands[0]
    if size <= config.oracle_cap:
        return "oracle"
    raise UnsupportedScale(f"no MWA solver applies within resource caps (n={inst.n}, k={k})")


SOLVERS: dict[str, Callable[[Instance, SolverConfig], SolveOutcome]] = {
    "colorcoded_path_cycle": mwa_colorcoded_path_cycle,
    "colorcoded_stars": mwa_colorcoded_stars,
    "symmetric_kdelta": mwa_symmetric_kdelta,
}


def mwa_solve(inst: Instance, config: SolverConfig = SolverConfig()) -> SolveOutcome:
    algo = config.algorithm
    if algo == "auto":
        algo = mwa_select(inst, config)
    if algo == "trivial":
        return trivial_outcome("mwa", inst)
    if algo == "oracle":
        out = oracle_solve("mwa", inst, config.oracle_cap)
        out.seed = config.seed
        return out
    if algo not in SOLVERS:
        raise DispatchError(f"unknown MWA algorithm {algo!r}; choose from {', '.join(ALGORITHMS)}")
    return SOLVERS[algo](inst, config)


__all__ = [
    "ALGORITHMS",
    "OracleTooLarge",
    "mwa_candidates",
    "mwa_colorcoded_path_cycle",
    "mwa_colorcoded_stars",
    "mwa_select",
    "mwa_solve",
    "mwa_symmetric_kdelta",
]
