import pytest

from helpers import brute, inst_from, pool_general_small
from seatplan.generators import gen_figure1
from seatplan.model import check_envy_free, check_exchange_stable, egalitarian, welfare
from seatplan.oracle import OracleTooLarge, oracle_size, oracle_solve

FIG = gen_figure1()


def test_figure1_all_problems():
    mwa = oracle_solve("mwa", FIG)
    assert mwa.value == 4 and welfare(FIG, mwa.certificate) == 4
    mua = oracle_solve("mua", FIG)
    assert mua.value == 0 and egalitarian(FIG, mua.certificate) == 0
    efa = oracle_solve("efa", FIG)
    assert efa.exists and check_envy_free(FIG, efa.certificate)
    esa = oracle_solve("esa", FIG)
    assert esa.exists and check_exchange_stable(FIG, esa.certificate)


def test_i3_mwa():
    inst = inst_from(3, {(0, 1): 1, (1, 0): -1, (2, 0): 2}, [(0, 1)])
    assert oracle_solve("mwa", inst).value == 2


def test_edgeless_esa_identity():
    inst = inst_from(3, {(0, 1): -4}, [])
    out = oracle_solve("esa", inst)
    assert out.exists and out.certificate.assignment == (0, 1, 2)


def test_enumeration_order_tie_break():
    # all arrangements tie; the first one is the first subset in its first order
    inst = inst_from(4, {}, [(1, 3)])
    out = oracle_solve("mwa", inst)
    assert out.certificate.agent_at[1] == 0 and out.certificate.agent_at[3] == 1
    assert out.trials_run == oracle_size(4, 2) == 12


def test_guard():
    inst = inst_from(8, {}, [(i, i + 1) for i in range(7)])
    with pytest.raises(OracleTooLarge, match="too large for oracle"):
        oracle_solve("mwa", inst, cap=1000)


def test_unknown_problem():
    with pytest.raises(Exception):
        oracle_solve("xyz", FIG)


def test_matches_full_permutation_enumeration():
    for inst in pool_general_small(120, seed=5, nmax=6):
        for problem in ("mwa", "mua", "efa", "esa"):
            out = oracle_solve(problem, inst)
            expected = brute(problem, inst)
            got = out.value if problem in ("mwa", "mua") else out.exists
            assert got == expected, (problem, inst)
            assert out.verify(inst)


def test_efa_implies_esa_on_pool():
    for inst in pool_general_small(120, seed=6):
        if oracle_solve("efa", inst).exists:
            assert oracle_solve("esa", inst).exists
