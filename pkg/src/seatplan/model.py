"""Instances, arrangements, evaluators, and class detection.

All weights are :class:`fractions.Fraction`; nothing in this package rounds.
Hot loops in the solvers work on :meth:`PreferenceProfile.scaled`, an integer
copy of the weight matrix multiplied by the common denominator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Sequence

Agent = int
Seat = int
Weight = Fraction


class SeatplanError(Exception):
    """Base class for every error raised by this package."""


class ArgumentError(SeatplanError, ValueError):
    """Malformed input: bad indices, broken invariants, unparsable values."""


def to_rational(value) -> Fraction:
    """Parse an exact rational.

    Accepts ints, Fractions, decimal or ``"num/den"`` strings, and
    ``[num, den]`` pairs. Floats are refused because they are not exact.
    """
    if isinstance(value, bool):
        raise ArgumentError(f"not a rational: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ArgumentError(f"not a rational: {value!r}") from exc
    if isinstance(value, (list, tuple)) and len(value) == 2:
        num, den = value
        if isinstance(num, int) and isinstance(den, int) and not isinstance(num, bool) and den != 0:
            return Fraction(num, den)
    raise ArgumentError(f"not an exact rational: {value!r}")


def format_rational(value: Fraction) -> str:
    """Decimal string when the value has a finite expansion, else ``num/den``."""
    value = Fraction(value)
    den = value.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return f"{value.numerator}/{value.denominator}"
    if value.denominator == 1:
        return str(value.numerator)
    digits = max(twos, fives)
    scaled = value * 10**digits
    assert scaled.denominator == 1
    sign = "-" if scaled < 0 else ""
    text = str(abs(scaled.numerator)).rjust(digits + 1, "0")
    return f"{sign}{text[:-digits]}.{text[-digits:]}"


@dataclass(frozen=True, eq=False)
class PreferenceProfile:
    """Cardinal preferences ``s_p(q)`` as a sparse arc map.

    Missing pairs weigh 0; zero-weight entries are dropped on construction so
    that the stored arcs are exactly the arcs of the preference graph.
    """

    n: int
    arcs: Mapping[tuple[Agent, Agent], Weight] = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 0:
            raise ArgumentError(f"agent count must be a non-negative int, got {self.n!r}")
        clean: dict[tuple[int, int], Fraction] = {}
        for key, raw in dict(self.arcs).items():
            try:
                p, q = key
            except (TypeError, ValueError) as exc:
                raise ArgumentError(f"arc key must be a pair, got {key!r}") from exc
            if not (0 <= p < self.n and 0 <= q < self.n):
                raise ArgumentError(f"arc ({p}, {q}) out of range for n={self.n}")
            if p == q:
                raise ArgumentError(f"self-preference on agent {p}")
            w = to_rational(raw)
            if w != 0:
                clean[(int(p), int(q))] = w
        object.__setattr__(self, "arcs", MappingProxyType(dict(sorted(clean.items()))))

    def __eq__(self, other):
        if not isinstance(other, PreferenceProfile):
            return NotImplemented
        return self.n == other.n and dict(self.arcs) == dict(other.arcs)

    def __hash__(self):
        return hash((self.n, frozenset(self.arcs.items())))

    def weight(self, p: Agent, q: Agent) -> Weight:
        return self.arcs.get((p, q), Fraction(0))

    @cached_property
    def matrix(self) -> tuple[tuple[Fraction, ...], ...]:
        rows = [[Fraction(0)] * self.n for _ in range(self.n)]
        for (p, q), w in self.arcs.items():
            rows[p][q] = w
        return tuple(tuple(r) for r in rows)

    @cached_property
    def scale(self) -> int:
        """Least common denominator of all weights."""
        return math.lcm(1, *(w.denominator for w in self.arcs.values()))

    @cached_property
    def scaled(self) -> tuple[tuple[int, ...], ...]:
        """Integer weight matrix equal to ``scale * s_p(q)``."""
        s = self.scale
        rows = [[0] * self.n for _ in range(self.n)]
        for (p, q), w in self.arcs.items():
            rows[p][q] = int(w * s)
        return tuple(tuple(r) for r in rows)

    @cached_property
    def out_neighbors(self) -> tuple[tuple[Agent, ...], ...]:
        out = [[] for _ in range(self.n)]
        for p, q in self.arcs:
            out[p].append(q)
        return tuple(tuple(sorted(o)) for o in out)

    @cached_property
    def in_neighbors(self) -> tuple[tuple[Agent, ...], ...]:
        inn = [[] for _ in range(self.n)]
        for p, q in self.arcs:
            inn[q].append(p)
        return tuple(tuple(sorted(i)) for i in inn)


@dataclass(frozen=True)
class SeatGraph:
    """Simple undirected graph on seats ``0..n-1``."""

    n: int
    edges: frozenset = frozenset()

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 0:
            raise ArgumentError(f"seat count must be a non-negative int, got {self.n!r}")
        norm = set()
        for e in self.edges:
            try:
                u, v = e
            except (TypeError, ValueError) as exc:
                raise ArgumentError(f"edge must be a pair, got {e!r}") from exc
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ArgumentError(f"edge ({u}, {v}) out of range for n={self.n}")
            if u == v:
                raise ArgumentError(f"loop on seat {u}")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "SeatGraph":
        edges = [tuple(e) for e in edges]
        seen = set()
        for u, v in edges:
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ArgumentError(f"duplicate edge {key}")
            seen.add(key)
        return cls(n, frozenset(edges))

    @cached_property
    def neighbors(self) -> tuple[tuple[Seat, ...], ...]:
        adj = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    def degree(self, v: Seat) -> int:
        return len(self.neighbors[v])

    def adjacent(self, u: Seat, v: Seat) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def sorted_edges(self) -> list[tuple[Seat, Seat]]:
        return sorted(self.edges)


@dataclass(frozen=True)
class Instance:
    profile: PreferenceProfile
    seats: SeatGraph
    names: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if self.profile.n != self.seats.n:
            raise ArgumentError(
                f"{self.profile.n} agents but {self.seats.n} seats; counts must match"
            )
        if self.names is not None:
            names = tuple(str(x) for x in self.names)
            if len(names) != self.n:
                raise ArgumentError("one name per agent required")
            if names == tuple(f"p{i + 1}" for i in range(self.n)):
                names = None  # the default labels; keeps equality independent of spelling
            object.__setattr__(self, "names", names)

    @property
    def n(self) -> int:
        return self.profile.n

    def agent_name(self, p: Agent) -> str:
        return self.names[p] if self.names is not None else f"p{p + 1}"

    @cached_property
    def seat_analysis(self) -> "SeatGraphAnalysis":
        return analyze_seats(self.seats)

    @cached_property
    def preference_analysis(self) -> "PreferenceAnalysis":
        return analyze_preferences(self.profile)

    def with_profile(self, profile: PreferenceProfile) -> "Instance":
        return Instance(profile, self.seats, self.names)


@dataclass(frozen=True)
class Arrangement:
    """Bijection agent -> seat, stored as ``assignment[agent] = seat``."""

    assignment: tuple[Seat, ...]

    def __post_init__(self):
        a = tuple(int(x) for x in self.assignment)
        if sorted(a) != list(range(len(a))):
            raise ArgumentError(f"assignment {a} is not a bijection onto 0..{len(a) - 1}")
        object.__setattr__(self, "assignment", a)

    @classmethod
    def identity(cls, n: int) -> "Arrangement":
        return cls(tuple(range(n)))

    @classmethod
    def from_agents_at(cls, agent_at: Sequence[Agent]) -> "Arrangement":
        seat = [0] * len(agent_at)
        for v, p in enumerate(agent_at):
            seat[p] = v
        return cls(tuple(seat))

    @property
    def n(self) -> int:
        return len(self.assignment)

    def __getitem__(self, p: Agent) -> Seat:
        return self.assignment[p]

    def __len__(self):
        return len(self.assignment)

    @cached_property
    def agent_at(self) -> tuple[Agent, ...]:
        inv = [0] * self.n
        for p, v in enumerate(self.assignment):
            inv[v] = p
        return tuple(inv)


def complete_arrangement(n: int, placed: Mapping[Agent, Seat]) -> Arrangement:
    """Extend a partial arrangement: unplaced agents fill free seats in index order."""
    seat = [-1] * n
    used = set()
    for p, v in placed.items():
        if v in used:
            raise ArgumentError(f"seat {v} assigned twice")
        used.add(v)
        seat[p] = v
    free = iter(v for v in range(n) if v not in used)
    for p in range(n):
        if seat[p] < 0:
            seat[p] = next(free)
    return Arrangement(tuple(seat))


def _check_arrangement(inst: Instance, arr: Arrangement) -> None:
    if arr.n != inst.n:
        raise ArgumentError(f"arrangement has {arr.n} agents, instance has {inst.n}")


def _check_agent(inst: Instance, p: Agent) -> None:
    if not (isinstance(p, int) and 0 <= p < inst.n):
        raise ArgumentError(f"agent index {p!r} out of range for n={inst.n}")


def utility(inst: Instance, arr: Arrangement, p: Agent) -> Weight:
    _check_arrangement(inst, arr)
    _check_agent(inst, p)
    at = arr.agent_at
    w = inst.profile.weight
    return sum((w(p, at[v]) for v in inst.seats.neighbors[arr[p]]), Fraction(0))


def utilities(inst: Instance, arr: Arrangement) -> list[Weight]:
    _check_arrangement(inst, arr)
    return [utility(inst, arr, p) for p in range(inst.n)]


def welfare(inst: Instance, arr: Arrangement) -> Weight:
    return sum(utilities(inst, arr), Fraction(0))


def egalitarian(inst: Instance, arr: Arrangement) -> Weight:
    us = utilities(inst, arr)
    return min(us) if us else Fraction(0)


def swap(arr: Arrangement, p: Agent, q: Agent) -> Arrangement:
    a = list(arr.assignment)
    a[p], a[q] = a[q], a[p]
    return Arrangement(tuple(a))


def envies(inst: Instance, arr: Arrangement, p: Agent, q: Agent) -> bool:
    """True iff ``p`` strictly gains by trading seats with ``q``."""
    _check_agent(inst, p)
    _check_agent(inst, q)
    if p == q:
        raise ArgumentError("an agent cannot envy itself")
    return utility(inst, arr, p) < utility(inst, swap(arr, p, q), p)


@dataclass(frozen=True)
class Verdict:
    holds: bool
    witness: Optional[tuple[Agent, Agent]] = None

    def __bool__(self):
        return self.holds


def check_envy_free(inst: Instance, arr: Arrangement) -> Verdict:
    """Envy-freeness, with the lexicographically smallest envious pair as witness."""
    _check_arrangement(inst, arr)
    for p in range(inst.n):
        for q in range(inst.n):
            if p != q and envies(inst, arr, p, q):
                return Verdict(False, (p, q))
    return Verdict(True)


def check_exchange_stable(inst: Instance, arr: Arrangement) -> Verdict:
    """Exchange stability, with the smallest mutually envious pair as witness."""
    _check_arrangement(inst, arr)
    for p in range(inst.n):
        for q in range(p + 1, inst.n):
            if envies(inst, arr, p, q) and envies(inst, arr, q, p):
                return Verdict(False, (p, q))
    return Verdict(True)


SEAT_CLASSES = ("clique", "matching", "stars", "path", "cycle", "general")


@dataclass(frozen=True)
class SeatGraphAnalysis:
    k: int
    classes: frozenset
    nonisolated: tuple[Seat, ...]
    components: tuple[tuple[Seat, ...], ...]

    def has(self, cls: str) -> bool:
        return cls in self.classes

    @property
    def primary_class(self) -> str:
        for c in SEAT_CLASSES:
            if c in self.classes:
                return c
        return "general"


def analyze_seats(seats: SeatGraph) -> SeatGraphAnalysis:
    deg = [seats.degree(v) for v in range(seats.n)]
    nonisolated = tuple(v for v in range(seats.n) if deg[v] > 0)
    k = len(nonisolated)
    comps = []
    seen = set()
    for v in nonisolated:
        if v in seen:
            continue
        stack, comp = [v], []
        seen.add(v)
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in seats.neighbors[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(tuple(sorted(comp)))
    comps.sort()
    if k == 0:
        return SeatGraphAnalysis(0, frozenset({"general"}), (), ())

    def comp_edges(c):
        return sum(deg[v] for v in c) // 2

    classes = set()
    if len(comps) == 1:
        c = comps[0]
        m = comp_edges(c)
        size = len(c)
        if m == size * (size - 1) // 2:
            classes.add("clique")
        if m == size - 1 and max(deg[v] for v in c) <= 2:
            classes.add("path")
        if size >= 3 and all(deg[v] == 2 for v in c):
            classes.add("cycle")
    if all(comp_edges(c) == len(c) - 1 and max(deg[v] for v in c) == len(c) - 1 for c in comps):
        classes.add("stars")
    if all(deg[v] == 1 for v in nonisolated):
        classes.add("matching")
    if not classes:
        classes.add("general")
    return SeatGraphAnalysis(k, frozenset(classes), nonisolated, tuple(comps))


@dataclass(frozen=True)
class PreferenceAnalysis:
    binary: bool
    nonnegative: bool
    positive: bool
    symmetric: bool
    strict: bool
    delta_plus: int

    def flags(self) -> dict:
        return {
            "binary": self.binary,
            "nonnegative": self.nonnegative,
            "positive": self.positive,
            "symmetric": self.symmetric,
            "strict": self.strict,
        }


def analyze_preferences(profile: PreferenceProfile) -> PreferenceAnalysis:
    n = profile.n
    vals = profile.arcs.values()
    nonneg = all(w > 0 for w in vals)
    binary = all(w == 1 for w in vals)
    positive = len(profile.arcs) == n * (n - 1) and nonneg
    symmetric = all(profile.weight(q, p) == w for (p, q), w in profile.arcs.items())
    strict = True
    for p in range(n):
        row = [profile.weight(p, q) for q in range(n) if q != p]
        if len(set(row)) != len(row):
            strict = False
            break
    delta = max((len(o) for o in profile.out_neighbors), default=0)
    return PreferenceAnalysis(binary, nonneg, positive, symmetric, strict, delta)


def automorphism_lower_bound(inst_or_seats, cap: int = 100_000) -> int:
    """Lower bound on the automorphism count of the non-isolated seat subgraph.

    Exact for the named classes; for other graphs, automorphisms are counted
    by VF2 up to ``cap``.
    """
    seats = inst_or_seats.seats if isinstance(inst_or_seats, Instance) else inst_or_seats
    a = analyze_seats(seats)
    k = a.k
    if k == 0:
        return 1
    if "clique" in a.classes:
        return math.factorial(k)
    if "cycle" in a.classes:
        return 2 * k
    if "path" in a.classes:
        return 2
    if "stars" in a.classes:
        total = 1
        sizes: dict[int, int] = {}
        for c in a.components:
            leaves = len(c) - 1
            total *= 2 if leaves == 1 else math.factorial(leaves)
            sizes[leaves] = sizes.get(leaves, 0) + 1
        for count in sizes.values():
            total *= math.factorial(count)
        return total
    import networkx as nx
    from networkx.algorithms.isomorphism import GraphMatcher

    g = nx.Graph()
    g.add_nodes_from(a.nonisolated)
    g.add_edges_from(seats.edges)
    count = 0
    for _ in GraphMatcher(g, g).isomorphisms_iter():
        count += 1
        if count >= cap:
            break
    return max(count, 1)
