import random
from fractions import Fraction

import pytest

from helpers import brute, inst_from, pool_clique_nonneg, pool_general_small, pool_kernel, random_arrangement
from seatplan.esa import (
    SwapCapExceeded,
    esa_clique_nonneg,
    esa_kernelize_kdelta,
    esa_select,
    esa_solve,
    esa_swap_dynamics_symmetric,
    swap_dynamics,
)
from seatplan.generators import GeneratorSpec, gen_figure1, gen_random
from seatplan.model import Arrangement, check_exchange_stable, welfare
from seatplan.oracle import DispatchError, SolverConfig, oracle_solve


def test_clique_nonneg_identity():
    for inst in pool_clique_nonneg(30, seed=51):
        out = esa_clique_nonneg(inst)
        assert out.exists and out.certificate == Arrangement.identity(inst.n)
        assert check_exchange_stable(inst, out.certificate)


def test_clique_zero_and_guard():
    assert esa_clique_nonneg(inst_from(3, {}, [(0, 1)])).exists
    with pytest.raises(DispatchError):
        esa_clique_nonneg(inst_from(3, {(0, 1): -1}, [(0, 1)]))


def test_kernel_independent_agents():
    inst = inst_from(5, {(0, 1): -5}, [(0, 1)])
    out = esa_kernelize_kdelta(inst)
    assert out.exists and check_exchange_stable(inst, out.certificate)


def test_kernel_reduced_instance():
    arcs = {(p, q): -1 for p in range(4) for q in range(4) if p != q}
    inst = inst_from(4, arcs, [(0, 1), (1, 2)])
    assert esa_kernelize_kdelta(inst).exists == oracle_solve("esa", inst).exists == brute("esa", inst)


def test_kernel_all_zero():
    assert esa_kernelize_kdelta(inst_from(4, {}, [(0, 1)])).exists


def test_kernel_preserves_answers():
    for inst in pool_kernel(60, seed=52):
        assert esa_kernelize_kdelta(inst).exists == oracle_solve("esa", inst).exists


def test_swap_example():
    # a-b 5, c-d 5, a-c 1; seats are two disjoint edges; start {a,c}, {b,d}
    inst = inst_from(4, {(0, 1): 5, (2, 3): 5, (0, 2): 1}, [(0, 1), (2, 3)], symmetric=True)
    start = Arrangement((0, 2, 1, 3))
    arr, trace = swap_dynamics(inst, start)
    assert trace.steps == [(0, 3, Fraction(2), Fraction(20))]
    assert welfare(inst, arr) == 20 and check_exchange_stable(inst, arr)


def test_swap_already_stable():
    inst = inst_from(4, {(0, 1): 5, (2, 3): 5}, [(0, 1), (2, 3)], symmetric=True)
    _, trace = swap_dynamics(inst)
    assert len(trace) == 0


def test_swap_all_zero():
    out = esa_swap_dynamics_symmetric(inst_from(5, {}, [(0, 1), (1, 2)]))
    assert out.exists and len(out.extra["trace"]) == 0


def test_swap_guard_and_cap():
    with pytest.raises(DispatchError):
        esa_swap_dynamics_symmetric(gen_figure1())
    inst = inst_from(4, {(0, 1): 5, (2, 3): 5, (0, 2): 1}, [(0, 1), (2, 3)], symmetric=True)
    with pytest.raises(SwapCapExceeded):
        swap_dynamics(inst, Arrangement((0, 2, 1, 3)), cap=0)


def test_swap_welfare_increases():
    rng = random.Random(53)
    for i in range(40):
        n = rng.randint(3, 10)
        k = rng.randint(2, n)
        inst = gen_random(GeneratorSpec(n=n, k=k, seats=rng.choice(("path", "clique", "general")),
                                        prefs="symmetric", seed=i))
        arr, trace = swap_dynamics(inst, random_arrangement(n, rng))
        assert check_exchange_stable(inst, arr)
        for _, _, before, after in trace.steps:
            assert after > before


def test_efa_implies_esa():
    for inst in pool_general_small(80, seed=54):
        if oracle_solve("efa", inst).exists:
            assert esa_solve(inst).exists


def test_dispatch():
    assert esa_select(gen_figure1()) == "oracle"
    assert esa_solve(gen_figure1()).exists
    sym = inst_from(10, {(0, 1): -2, (2, 3): 4}, [(i, i + 1) for i in range(6)], symmetric=True)
    assert esa_select(sym) == "swap_dynamics"
    assert esa_solve(sym).exists
    gen = inst_from(5, {(0, 1): -1, (1, 2): 3}, [(0, 1), (1, 2)])
    assert esa_select(gen) == "oracle"
