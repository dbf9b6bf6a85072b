from fractions import Fraction

import pytest

from helpers import (
    graph_corpus,
    has_clique,
    has_hamiltonian_path,
    has_independent_set,
    pool_planted_efa,
)
from seatplan.formats import instance_from_dict, instance_to_dict
from seatplan.generators import (
    FIGURE1_SIGMA1,
    FIGURE1_SIGMA2,
    GeneratorSpec,
    gen_clique_to_mwa,
    gen_figure1,
    gen_ham_to_mwa,
    gen_is_to_esa,
    gen_random,
)
from seatplan.model import ArgumentError, Arrangement, check_envy_free, utilities
from seatplan.oracle import oracle_solve

PETERSEN = [(i, (i + 1) % 5) for i in range(5)] + [(i, i + 5) for i in range(5)] + \
    [(5 + i, 5 + (i + 2) % 5) for i in range(5)]


def test_figure1():
    inst = gen_figure1()
    assert inst.n == 4 and inst.seat_analysis.k == 3
    assert inst.preference_analysis.delta_plus == 1
    assert oracle_solve("mwa", inst).value == 4
    assert oracle_solve("mua", inst).value == 0
    assert utilities(inst, FIGURE1_SIGMA1) == [-1, 3, 0, 2]
    assert check_envy_free(inst, FIGURE1_SIGMA2)


def test_random_deterministic():
    spec = GeneratorSpec(n=6, k=4, seats="path", prefs="binary", seed=1)
    assert gen_random(spec) == gen_random(spec)
    assert gen_random(spec) != gen_random(GeneratorSpec(n=6, k=4, seats="path", prefs="binary", seed=2))


@pytest.mark.parametrize("seats", ["path", "cycle", "clique", "stars", "matching", "general"])
def test_random_seat_class(seats):
    for seed in range(10):
        inst = gen_random(GeneratorSpec(n=9, k=6, seats=seats, seed=seed))
        a = inst.seat_analysis
        assert a.k == 6
        assert seats in a.classes or seats == "general"


def test_random_preference_flags():
    for seed in range(20):
        sym = gen_random(GeneratorSpec(n=7, k=3, prefs="symmetric", seed=seed))
        assert sym.preference_analysis.symmetric
        nn = gen_random(GeneratorSpec(n=7, k=3, prefs="nonneg", seed=seed))
        assert nn.preference_analysis.nonnegative
        capped = gen_random(GeneratorSpec(n=9, k=3, delta_cap=2, density=0.9, seed=seed))
        assert capped.preference_analysis.delta_plus <= 2
        binary = gen_random(GeneratorSpec(n=6, k=3, prefs="binary", seed=seed))
        assert set(binary.profile.arcs.values()) <= {1}


def test_random_strict_rows_distinct():
    inst = gen_random(GeneratorSpec(n=6, k=3, prefs="strict", low=-4, high=4, seed=3))
    for p in range(6):
        row = [inst.profile.weight(p, q) for q in range(6) if q != p]
        assert len(set(row)) == 5


@pytest.mark.parametrize("kw", [
    dict(n=5, k=2, seats="cycle"),
    dict(n=5, k=3, seats="matching"),
    dict(n=3, k=5),
    dict(n=4, k=2, seats="hexagon"),
    dict(n=4, k=2, prefs="sometimes"),
])
def test_random_rejects_bad_specs(kw):
    with pytest.raises(ArgumentError):
        gen_random(GeneratorSpec(**kw))


def test_clique_reduction_examples():
    k5 = [(i, j) for i in range(5) for j in range(i + 1, 5)]
    g = gen_clique_to_mwa(5, k5, 4)
    assert g.metadata["threshold"] == "12"
    assert oracle_solve("mwa", g.instance).value == 12
    g = gen_clique_to_mwa(10, PETERSEN, 3)
    assert oracle_solve("mwa", g.instance).value < 6
    assert gen_clique_to_mwa(3, [(0, 1)], 1).metadata["threshold"] == "0"


def test_is_reduction_examples():
    g = gen_is_to_esa(4, [], 3)
    assert g.instance.n == 6 and g.instance.names[-2:] == ("x1", "x2")
    assert oracle_solve("esa", g.instance).exists
    k4 = [(i, j) for i in range(4) for j in range(i + 1, 4)]
    assert not oracle_solve("esa", gen_is_to_esa(4, k4, 2).instance).exists
    assert oracle_solve("esa", gen_is_to_esa(1, [], 1).instance).exists


def test_ham_reduction_examples():
    g = gen_ham_to_mwa(4, [(0, 1), (1, 2), (2, 3)])
    assert g.metadata["threshold"] == "6" and oracle_solve("mwa", g.instance).value == 6
    star = gen_ham_to_mwa(4, [(0, 1), (0, 2), (0, 3)])
    assert oracle_solve("mwa", star.instance).value < 6
    assert gen_ham_to_mwa(1, []).metadata["threshold"] == "0"


def test_reductions_on_small_corpus():
    for n, edges in graph_corpus(seed=61, count=20):
        h = max(1, n // 2)
        g = gen_clique_to_mwa(n, edges, h)
        reached = oracle_solve("mwa", g.instance).value >= Fraction(g.metadata["threshold"])
        assert reached == has_clique(n, edges, h)
        g = gen_ham_to_mwa(n, edges)
        reached = oracle_solve("mwa", g.instance).value >= Fraction(g.metadata["threshold"])
        assert reached == has_hamiltonian_path(n, edges)


def test_reduction_rejects_bad_graphs():
    with pytest.raises(ArgumentError):
        gen_clique_to_mwa(3, [(0, 0)], 2)
    with pytest.raises(ArgumentError):
        gen_clique_to_mwa(3, [(0, 1), (1, 0)], 2)
    with pytest.raises(ArgumentError):
        gen_is_to_esa(3, [(0, 1)], 4)


def test_planted_efa_certificate_is_envy_free():
    for g in pool_planted_efa(40, seed=62):
        inst = g.instance
        assert inst.preference_analysis.nonnegative
        assert check_envy_free(inst, Arrangement(tuple(g.metadata["planted"])))


def test_round_trip():
    insts = [gen_figure1(), gen_is_to_esa(3, [(0, 1)], 2).instance]
    insts += [gen_random(GeneratorSpec(n=6, k=4, seats=s, seed=i))
              for i, s in enumerate(("path", "stars", "general"))]
    for inst in insts:
        back, _ = instance_from_dict(instance_to_dict(inst))
        assert back == inst


def test_independent_set_brute_force_sanity():
    assert has_independent_set(3, [], 3)
    assert not has_independent_set(3, [(0, 1), (1, 2), (0, 2)], 2)
