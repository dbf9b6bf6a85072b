"""Test-only oracles and seeded instance pools."""

from __future__ import annotations

import itertools
import random

from seatplan.generators import GeneratorSpec, gen_planted_efa, gen_random, random_seat_graph
from seatplan.model import (
    Arrangement,
    Instance,
    PreferenceProfile,
    SeatGraph,
    check_envy_free,
    check_exchange_stable,
    egalitarian,
    welfare,
)


def brute(problem: str, inst: Instance):
    """Every bijection, evaluated with the reference evaluators. Deliberately naive."""
    best = None
    for perm in itertools.permutations(range(inst.n)):
        arr = Arrangement(perm)
        if problem == "mwa":
            v = welfare(inst, arr)
            best = v if best is None or v > best else best
        elif problem == "mua":
            v = egalitarian(inst, arr)
            best = v if best is None or v > best else best
        elif problem == "efa":
            if check_envy_free(inst, arr):
                return True
        elif check_exchange_stable(inst, arr):
            return True
    return best if problem in ("mwa", "mua") else False


def answer(out):
    return out.value if out.problem in ("mwa", "mua") else out.exists


def inst_from(n, arcs, edges, symmetric=False):
    if symmetric:
        arcs = dict(arcs) | {(q, p): w for (p, q), w in arcs.items()}
    return Instance(PreferenceProfile(n, arcs), SeatGraph.from_edges(n, edges))


def random_arrangement(n, rng):
    seats = list(range(n))
    rng.shuffle(seats)
    return Arrangement(tuple(seats))


# pools --------------------------------------------------------------------------
#
# Parameters keep the randomized solvers' trial budgets at desk scale:
# color coding at k <= 4, random separation at k(1+Δ⁺) <= 6.

def _spec(rng, seed, **kw):
    return gen_random(GeneratorSpec(seed=seed, **kw))


def pool_path_cycle(count, seed=0, nmax=7):
    rng = random.Random(seed)
    out = []
    for i in range(count):
        kind = rng.choice(("path", "cycle"))
        n = rng.randint(3, nmax)
        k = rng.randint(3 if kind == "cycle" else 2, min(4, n))
        prefs = rng.choice(("general", "general", "symmetric", "nonneg", "binary"))
        out.append(_spec(rng, seed * 100_003 + i, n=n, k=k, seats=kind, prefs=prefs,
                         density=rng.choice((0.3, 0.6))))
    return out


def pool_stars(count, seed=0, nmax=7):
    rng = random.Random(seed)
    out = []
    for i in range(count):
        n = rng.randint(2, nmax)
        k = rng.randint(2, min(4, n))
        prefs = rng.choice(("general", "general", "symmetric", "nonneg"))
        out.append(_spec(rng, seed * 100_003 + i, n=n, k=k, seats="stars", prefs=prefs,
                         density=rng.choice((0.3, 0.6))))
    return out


def _separation_shape(rng):
    """(k, Δ⁺ cap) with k(1+Δ⁺) <= 6."""
    return rng.choice(((2, 2), (2, 1), (3, 1), (2, 0)))


def pool_symmetric(count, seed=0, nmax=7):
    rng = random.Random(seed)
    out = []
    for i in range(count):
        k, cap = _separation_shape(rng)
        n = rng.randint(max(k, 3), nmax)
        seats = rng.choice(("path", "clique", "stars", "general"))
        out.append(_spec(rng, seed * 100_003 + i, n=n, k=k, seats=seats, prefs="symmetric",
                         delta_cap=cap, density=0.6))
    return out


def pool_nonneg(count, seed=0, nmax=7, symmetric=False, seats=None):
    rng = random.Random(seed)
    out = []
    for i in range(count):
        k, cap = _separation_shape(rng)
        n = rng.randint(max(k, 3), nmax)
        kind = seats or rng.choice(("path", "clique", "stars", "general"))
        prefs = "symmetric" if symmetric else rng.choice(("nonneg", "binary"))
        inst = _spec(rng, seed * 100_003 + i, n=n, k=k, seats=kind, prefs=prefs, delta_cap=cap,
                     density=rng.choice((0.3, 0.6)))
        if symmetric:
            # non-negative symmetric: mirror absolute values
            arcs = {pq: abs(w) for pq, w in inst.profile.arcs.items()}
            inst = Instance(PreferenceProfile(n, arcs), inst.seats)
        out.append(inst)
    return out


def pool_clique_nonneg_symmetric(count, seed=0, nmax=7):
    rng = random.Random(seed)
    out = []
    for i in range(count):
        n = rng.randint(2, nmax)
        k = rng.randint(2, n)
        inst = _spec(rng, seed * 100_003 + i, n=n, k=k, seats="clique", prefs="symmetric",
                     density=rng.choice((0.2, 0.4)))
        arcs = {pq: abs(w) for pq, w in inst.profile.arcs.items()}
        out.append(Instance(PreferenceProfile(n, arcs), inst.seats))
    return out


def pool_matching(count, seed=0, nmax=7):
    rng = random.Random(seed)
    out = []
    for i in range(count):
        if rng.random() < 0.75:
            k, cap, n = 2, 2, rng.randint(3, nmax)
        else:
            k, cap, n = 4, 1, rng.randint(5, nmax)
        prefs = rng.choice(("general", "general", "nonneg"))
        out.append(_spec(rng, seed * 100_003 + i, n=n, k=k, seats="matching", prefs=prefs,
                         delta_cap=cap, low=-2, high=3, density=rng.choice((0.3, 0.6))))
    return out


def pool_clique_nonneg(count, seed=0, nmax=7):
    rng = random.Random(seed)
    return [
        _spec(rng, seed * 100_003 + i, n=(n := rng.randint(2, nmax)), k=rng.randint(2, n),
              seats="clique", prefs=rng.choice(("nonneg", "binary", "positive")))
        for i in range(count)
    ]


def pool_kernel(count, seed=0, nmax=10):
    """At least one isolated seat, Δ⁺ <= 2, k <= 4; half of them dense enough to defeat the greedy."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        k = rng.randint(2, 4)
        dense = i % 2 == 0
        n = rng.randint(k + 1, min(nmax, k + 3) if dense else nmax)
        seats = rng.choice(("path", "clique", "stars", "general", "cycle" if k >= 3 else "path"))
        prefs = rng.choice(("general", "symmetric", "nonneg"))
        out.append(_spec(rng, seed * 100_003 + i, n=n, k=k, seats=seats, prefs=prefs,
                         delta_cap=2, density=0.9 if dense else 0.3))
    return out


def pool_general_small(count, seed=0, nmax=7):
    """Anything at all with n <= nmax; for invariants and dispatcher checks."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        n = rng.randint(2, nmax)
        k = rng.choice([0] + list(range(2, n + 1)))
        seats = rng.choice(("path", "clique", "stars", "general", "matching", "cycle"))
        if seats == "cycle" and k < 3 or seats == "matching" and k % 2:
            seats = "path"
        prefs = rng.choice(("general", "nonneg", "binary", "symmetric"))
        out.append(_spec(rng, seed * 100_003 + i, n=n, k=k, seats=seats, prefs=prefs,
                         density=rng.choice((0.2, 0.5, 0.8))))
    return out


def pool_planted_efa(count, seed=0, n=8):
    rng = random.Random(seed)
    out = []
    for i in range(count):
        k, kind = rng.choice(((2, "path"), (3, "path"), (3, "clique"), (3, "stars")))
        seats = random_seat_graph(n, k, kind, rng)
        out.append(gen_planted_efa(n, seats, seed=seed * 100_003 + i, delta_cap=1 if k == 3 else 2))
    return out


# source-graph brute force for the reductions ----------------------------------

def graph_corpus(seed=0, count=60):
    """Every graph on at most 3 vertices, then seeded random graphs on 4 to 6."""
    out = []
    for n in range(1, 4):
        pairs = list(itertools.combinations(range(n), 2))
        for bits in range(1 << len(pairs)):
            out.append((n, [e for i, e in enumerate(pairs) if bits >> i & 1]))
    rng = random.Random(seed)
    for _ in range(count):
        n = rng.randint(4, 6)
        d = rng.choice((0.2, 0.4, 0.6, 0.8))
        out.append((n, [e for e in itertools.combinations(range(n), 2) if rng.random() < d]))
    return out


def has_clique(n, edges, h):
    es = {frozenset(e) for e in edges}
    return any(all(frozenset(e) in es for e in itertools.combinations(c, 2))
               for c in itertools.combinations(range(n), h))


def has_independent_set(n, edges, h):
    es = {frozenset(e) for e in edges}
    return any(not any(frozenset(e) in es for e in itertools.combinations(c, 2))
               for c in itertools.combinations(range(n), h))


def has_hamiltonian_path(n, edges):
    es = {frozenset(e) for e in edges}
    return n <= 1 or any(all(frozenset(e) in es for e in zip(o, o[1:]))
                         for o in itertools.permutations(range(n)))

