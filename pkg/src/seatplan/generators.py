"""Instance sources: the worked example, seeded random families, and planted reductions."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .model import (
    Arrangement,
    ArgumentError,
    Instance,
    PreferenceProfile,
    SeatGraph,
    complete_arrangement,
)

SEAT_KINDS = ("path", "cycle", "clique", "stars", "matching", "general")
PREF_KINDS = ("general", "nonneg", "binary", "positive", "symmetric", "strict")
KINDS = ("figure1", "random", "clique_to_mwa", "is_to_esa", "ham_to_mwa", "planted_efa")


@dataclass(frozen=True)
class Generated:
    instance: Instance
    metadata: dict = field(default_factory=dict)


def gen_figure1() -> Instance:
    """Four agents, a triangle of seats and one isolated seat."""
    arcs = {(0, 1): -1, (1, 0): 3, (2, 1): 1, (3, 1): 2}
    seats = SeatGraph(4, frozenset({(0, 1), (1, 2), (0, 2)}))
    return Instance(PreferenceProfile(4, arcs), seats, ("p1", "p2", "p3", "p4"))


# σ₁ seats p1, p2, p4 on the triangle; σ₂ leaves p1 isolated.
FIGURE1_SIGMA1 = Arrangement((0, 1, 3, 2))
FIGURE1_SIGMA2 = Arrangement((3, 0, 1, 2))


# random ------------------------------------------------------------------------

@dataclass(frozen=True)
class GeneratorSpec:
    n: int
    k: int
    seats: str = "path"
    prefs: str = "general"
    delta_cap: Optional[int] = None
    low: int = -3
    high: int = 5
    density: float = 0.5
    seed: int = 0
    stars: Optional[tuple[int, ...]] = None  # leaf counts per star


def random_seat_graph(n: int, k: int, kind: str, rng: random.Random, stars=None) -> SeatGraph:
    if kind not in SEAT_KINDS:
        raise ArgumentError(f"unknown seat class {kind!r}")
    if not (0 <= k <= n):
        raise ArgumentError(f"need 0 <= k <= n, got k={k}, n={n}")
    if k == 1:
        raise ArgumentError("a single non-isolated seat is impossible")
    seats = list(range(n))
    rng.shuffle(seats)
    s = seats[:k]
    edges: list[tuple[int, int]] = []
    if k == 0:
        pass
    elif kind == "path":
        edges = [(s[i], s[i + 1]) for i in range(k - 1)]
    elif kind == "cycle":
        if k < 3:
            raise ArgumentError("a cycle needs at least 3 seats")
        edges = [(s[i], s[(i + 1) % k]) for i in range(k)]
    elif kind == "clique":
        edges = [(s[i], s[j]) for i in range(k) for j in range(i + 1, k)]
    elif kind == "matching":
        if k % 2:
            raise ArgumentError("a matching needs an even number of seats")
        edges = [(s[i], s[i + 1]) for i in range(0, k, 2)]
    elif kind == "stars":
        sizes = list(stars) if stars is not None else _random_star_sizes(k, rng)
        if sum(l + 1 for l in sizes) != k or any(l < 1 for l in sizes):
            raise ArgumentError(f"star leaf counts {sizes} do not cover {k} seats")
        pos = 0
        for leaves in sizes:
            c = s[pos]
            edges += [(c, s[pos + 1 + j]) for j in range(leaves)]
            pos += leaves + 1
    else:
        # connected random graph on the k seats: random tree plus extra edges
        for i in range(1, k):
            edges.append((s[rng.randrange(i)], s[i]))
        have = {frozenset(e) for e in edges}
        for i in range(k):
            for j in range(i + 1, k):
                e = frozenset((s[i], s[j]))
                if e not in have and rng.random() < 0.3:
                    edges.append((s[i], s[j]))
                    have.add(e)
    return SeatGraph.from_edges(n, edges)


def _random_star_sizes(k: int, rng: random.Random) -> list[int]:
    sizes = []
    left = k
    while left:
        if left == 2 or left == 3:
            size = left
        else:
            size = rng.randint(2, left - 2) if left > 3 else left
        sizes.append(size - 1)
        left -= size
    return sizes


def _draw(rng: random.Random, prefs: str, low: int, high: int) -> int:
    if prefs == "binary":
        return 1
    lo = max(low, 1) if prefs in ("nonneg", "positive") else low
    hi = max(high, lo)
    w = rng.randint(lo, hi)
    while w == 0:
        w = rng.randint(lo, hi)
    return w


def random_profile(spec: GeneratorSpec, rng: random.Random) -> PreferenceProfile:
    n, cap = spec.n, spec.delta_cap
    if spec.prefs not in PREF_KINDS:
        raise ArgumentError(f"unknown preference class {spec.prefs!r}")
    if spec.prefs == "positive":
        if cap is not None and cap < n - 1:
            raise ArgumentError("positive preferences need Δ⁺ = n-1")
        return PreferenceProfile(n, {(p, q): _draw(rng, "positive", spec.low, spec.high)
                                     for p in range(n) for q in range(n) if p != q})
    if spec.prefs == "strict":
        return _strict_profile(spec, rng)
    arcs: dict[tuple[int, int], int] = {}
    out = [0] * n
    sym = spec.prefs == "symmetric"
    pairs = [(p, q) for p in range(n) for q in range(n) if (p < q if sym else p != q)]
    rng.shuffle(pairs)
    for p, q in pairs:
        if rng.random() >= spec.density:
            continue
        if cap is not None and (out[p] >= cap or (sym and out[q] >= cap)):
            continue
        w = _draw(rng, spec.prefs, spec.low, spec.high)
        arcs[(p, q)] = w
        out[p] += 1
        if sym:
            arcs[(q, p)] = w
            out[q] += 1
    return PreferenceProfile(n, arcs)


def _strict_profile(spec: GeneratorSpec, rng: random.Random, retries: int = 1000) -> PreferenceProfile:
    """Per agent, resample the row until its n-1 values are pairwise distinct."""
    n = spec.n
    if spec.delta_cap is not None and spec.delta_cap < n - 2:
        raise ArgumentError("strict preferences allow at most one zero per agent, so Δ⁺ >= n-2")
    if spec.high - spec.low + 1 < n - 1:
        raise ArgumentError("weight range too narrow for strict preferences")
    arcs = {}
    for p in range(n):
        for _ in range(retries):
            row = [rng.randint(spec.low, spec.high) for _ in range(n - 1)]
            if len(set(row)) == len(row):
                break
        else:
            raise ArgumentError(f"could not draw a strict row for agent {p}")
        others = [q for q in range(n) if q != p]
        arcs.update({(p, q): w for q, w in zip(others, row)})
    return PreferenceProfile(n, arcs)


def gen_random(spec: GeneratorSpec) -> Instance:
    rng = random.Random(spec.seed)
    seats = random_seat_graph(spec.n, spec.k, spec.seats, rng, spec.stars)
    return Instance(random_profile(spec, rng), seats)


# reductions ---------------------------------------------------------------------

def _check_graph(n: int, edges) -> list[tuple[int, int]]:
    if n < 0:
        raise ArgumentError("vertex count must be non-negative")
    norm = set()
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n) or u == v:
            raise ArgumentError(f"bad edge ({u}, {v}) for a simple graph on {n} vertices")
        e = (min(u, v), max(u, v))
        if e in norm:
            raise ArgumentError(f"duplicate edge {e}")
        norm.add(e)
    return sorted(norm)


def _clique_seats(n: int, size: int) -> SeatGraph:
    return SeatGraph(n, frozenset((i, j) for i in range(size) for j in range(i + 1, size)))


def gen_clique_to_mwa(n: int, edges, h: int) -> Generated:
    """Welfare h(h-1) is reachable iff the graph has an h-clique."""
    edges = _check_graph(n, edges)
    if not (1 <= h <= n):
        raise ArgumentError(f"need 1 <= h <= {n}")
    arcs = {}
    for u, v in edges:
        arcs[(u, v)] = arcs[(v, u)] = 1
    inst = Instance(PreferenceProfile(n, arcs), _clique_seats(n, h) if h > 1 else SeatGraph(n))
    return Generated(inst, {"kind": "clique_to_mwa", "h": h, "threshold": str(h * (h - 1))})


def gen_is_to_esa(n: int, edges, h: int) -> Generated:
    """Exchange-stable arrangement exists iff the graph has an independent set of size h."""
    edges = _check_graph(n, edges)
    if not (1 <= h <= n):
        raise ArgumentError(f"need 1 <= h <= {n}")
    x1, x2 = n, n + 1
    arcs: dict = {}
    for u, v in edges:
        arcs[(u, v)] = arcs[(v, u)] = -1
    for p in range(n):
        arcs[(p, x2)] = h
        arcs[(x1, p)] = 1
        arcs[(x2, p)] = -1
    arcs[(x1, x2)] = -h
    arcs[(x2, x1)] = h
    names = tuple(f"v{i + 1}" for i in range(n)) + ("x1", "x2")
    inst = Instance(PreferenceProfile(n + 2, arcs), _clique_seats(n + 2, h + 1), names)
    return Generated(inst, {"kind": "is_to_esa", "h": h})


def gen_ham_to_mwa(n: int, edges) -> Generated:
    """Welfare 2(n-1) on an n-seat path is reachable iff the graph has a Hamiltonian path."""
    edges = _check_graph(n, edges)
    arcs = {}
    for u, v in edges:
        arcs[(u, v)] = arcs[(v, u)] = 1
    seats = SeatGraph(n, frozenset((i, i + 1) for i in range(n - 1)))
    return Generated(Instance(PreferenceProfile(n, arcs), seats),
                     {"kind": "ham_to_mwa", "threshold": str(2 * max(n - 1, 0))})


# planted envy-free instances --------------------------------------------------------

def gen_planted_efa(
    n: int,
    seats: SeatGraph,
    seed: int = 0,
    high: int = 3,
    delta_cap: int = 2,
    density: float = 0.5,
) -> Generated:
    """Non-negative instance with a known envy-free arrangement.

    A random set of agents is seated on the non-isolated seats; each of them
    likes only some of its seat neighbors, and all with the same value, so it
    cannot gain by moving.  The others like only each other.
    """
    rng = random.Random(seed)
    if seats.n != n:
        raise ArgumentError("seat graph size must equal n")
    nbrs = seats.neighbors
    nonisolated = [v for v in range(n) if nbrs[v]]
    agents = list(range(n))
    rng.shuffle(agents)
    placed = dict(zip(agents, range(n)))  # agent -> seat
    at = {v: p for p, v in placed.items()}
    inner = {at[v] for v in nonisolated}
    arcs = {}
    for p in inner:
        w = rng.randint(1, high)
        liked = [at[u] for u in nbrs[placed[p]] if rng.random() < density][:delta_cap]
        for q in liked:
            arcs[(p, q)] = w
    outer = [p for p in range(n) if p not in inner]
    for p in outer:
        cands = [q for q in outer if q != p]
        rng.shuffle(cands)
        for q in cands[:rng.randint(0, delta_cap)]:
            arcs[(p, q)] = rng.randint(1, high)
    inst = Instance(PreferenceProfile(n, arcs), seats)
    cert = complete_arrangement(n, placed)
    return Generated(inst, {"kind": "planted_efa", "planted": list(cert.assignment)})
