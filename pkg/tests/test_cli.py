import csv
import json
from fractions import Fraction
from pathlib import Path

import pytest

from helpers import inst_from, pool_general_small
from seatplan.cli import main
from seatplan.formats import (
    dumps,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    outcome_from_dict,
    parse_arrangement,
)
from seatplan.generators import gen_figure1
from seatplan.model import ArgumentError, Arrangement

DOCS = Path(__file__).resolve().parent.parent / "docs"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def fig1(tmp_path):
    path = tmp_path / "fig1.json"
    assert main(["generate", "--kind", "figure1", "--out", str(path)]) == 0
    return path


def _without_timing(text):
    doc = json.loads(text)
    doc.pop("wall_time_ms", None)
    return doc


def test_golden_instance(fig1):
    assert fig1.read_text() == (DOCS / "fig1.json").read_text()


def test_golden_result(capsys):
    code, out, _ = run(capsys, "solve", "--problem", "mwa", "--input", str(DOCS / "fig1.json"))
    assert code == 0
    assert _without_timing(out) == _without_timing((DOCS / "fig1.mwa.result.json").read_text())
    assert json.loads(out)["value"] == "4"


def test_golden_result_revalidates():
    inst, _ = load_instance(DOCS / "fig1.json")
    doc = json.loads((DOCS / "fig1.mwa.result.json").read_text())
    out = outcome_from_dict(doc, inst)
    assert out.value == 4
    doc["value"] = "5"
    with pytest.raises(ArgumentError):
        outcome_from_dict(doc, inst)


def test_check_envy(capsys, fig1):
    code, out, _ = run(capsys, "check", "--input", str(fig1), "--arrangement", "0,1,3,2", "--concept", "ef")
    doc = json.loads(out)
    assert code == 0 and doc["holds"] is False
    assert doc["witness"] == ["p1", "p3"]
    assert doc["utilities"] == ["-1", "3", "0", "2"]


def test_check_values(capsys, fig1):
    _, out, _ = run(capsys, "check", "--input", str(fig1), "--arrangement", "[0,1,3,2]", "--concept", "welfare")
    assert json.loads(out)["value"] == "4"
    _, out, _ = run(capsys, "check", "--input", str(fig1), "--arrangement", "3,0,1,2", "--concept", "es")
    assert json.loads(out)["holds"] is True


def test_threshold_exit_codes(capsys, fig1):
    assert run(capsys, "solve", "--problem", "mua", "--input", str(fig1), "--threshold", "1")[0] == 1
    assert run(capsys, "solve", "--problem", "mua", "--input", str(fig1), "--threshold", "0")[0] == 0
    assert run(capsys, "solve", "--problem", "mwa", "--input", str(fig1), "--threshold", "9/2")[0] == 1


@pytest.mark.parametrize("argv", [
    ["solve", "--problem", "xyz", "--input", "FIG"],
    ["solve", "--problem", "efa", "--input", "FIG", "--threshold", "1"],
    ["solve", "--problem", "mwa", "--input", "FIG", "--algorithm", "symmetric_kdelta"],
    ["solve", "--problem", "mwa", "--input", "FIG", "--delta", "0"],
    ["solve", "--problem", "mwa", "--input", "missing.json"],
    ["check", "--input", "FIG", "--arrangement", "0,0,1,2", "--concept", "ef"],
    ["generate", "--kind", "random"],
    [],
])
def test_argument_errors(capsys, fig1, argv):
    argv = [str(fig1) if a == "FIG" else a for a in argv]
    code, _, err = run(capsys, *argv)
    assert code == 2
    doc = json.loads(err)
    assert doc["exit_code"] == 2 and doc["message"]


def test_resource_error(capsys, fig1):
    code, _, err = run(capsys, "solve", "--problem", "mwa", "--input", str(fig1), "--oracle-cap", "3")
    assert code == 3 and json.loads(err)["error"] == "resource"


def test_generate_and_classify(capsys, tmp_path):
    path = tmp_path / "r.json"
    assert main(["generate", "--kind", "random", "--n", "7", "--k", "4", "--seats", "stars",
                 "--prefs", "symmetric", "--seed", "3", "--out", str(path)]) == 0
    code, out, _ = run(capsys, "classify", "--input", str(path))
    doc = json.loads(out)
    assert code == 0 and doc["k"] == 4 and "stars" in doc["classes"]
    assert doc["preferences"]["symmetric"] is True


def test_generate_reductions(capsys):
    code, out, _ = run(capsys, "generate", "--kind", "clique_to_mwa", "--graph", "4:0-1,1-2,0-2", "--h", "3")
    doc = json.loads(out)
    assert code == 0 and doc["metadata"]["threshold"] == "6"
    code, out, _ = run(capsys, "generate", "--kind", "is_to_esa", "--graph", "3:0-1", "--h", "2")
    assert code == 0 and json.loads(out)["agents"][-2:] == ["x1", "x2"]
    code, out, _ = run(capsys, "generate", "--kind", "ham_to_mwa", "--graph", "3:0-1,1-2")
    assert code == 0 and json.loads(out)["metadata"]["threshold"] == "4"


def test_same_seed_same_bytes(capsys, tmp_path):
    path = tmp_path / "p.json"
    main(["generate", "--kind", "random", "--n", "12", "--k", "4", "--seats", "path", "--seed", "5",
          "--out", str(path)])
    capsys.readouterr()
    argv = ["solve", "--problem", "mwa", "--input", str(path), "--algorithm", "colorcoded_path_cycle",
            "--seed", "11"]
    first = run(capsys, *argv)[1]
    second = run(capsys, *argv, "--threads", "4")[1]
    assert _without_timing(first) == _without_timing(second)


def test_bench_smoke(capsys, tmp_path):
    code, out, _ = run(capsys, "bench", "--suite", "smoke", "--out", str(tmp_path))
    summary = json.loads(out)
    assert code == 0 and summary["mismatches"] == 0
    rows = list(csv.DictReader(open(tmp_path / "bench.csv")))
    assert len(rows) == summary["rows"] and all(r["agrees_with_oracle"] == "True" for r in rows)


def test_instance_round_trip():
    for inst in pool_general_small(50, seed=71):
        text = dumps(instance_to_dict(inst))
        back, _ = instance_from_dict(json.loads(text))
        assert back == inst


def test_rationals_serialized_exactly():
    inst = inst_from(3, {(0, 1): Fraction(1, 3), (1, 2): Fraction(5, 2), (2, 0): Fraction(-7)}, [(0, 1)])
    doc = instance_to_dict(inst)
    assert [e["value"] for e in doc["preferences"]] == ["1/3", "2.5", "-7"]
    assert instance_from_dict(doc)[0] == inst


@pytest.mark.parametrize("doc", [
    {"agents": ["a"], "seats": {"n": 2, "edges": []}},
    {"seats": {"n": 2, "edges": [[0, 0]]}},
    {"seats": {"n": 2, "edges": []}, "preferences": [{"from": 0, "to": 5, "value": "1"}]},
    {"seats": {"n": 2, "edges": []}, "preferences": [{"from": 0, "to": 1, "value": "abc"}]},
    {"seats": {"n": "2"}},
    [],
])
def test_malformed_instances(doc):
    with pytest.raises(ArgumentError):
        instance_from_dict(doc)


def test_parse_arrangement_forms(tmp_path):
    assert parse_arrangement("0,1,3,2", 4) == Arrangement((0, 1, 3, 2))
    assert parse_arrangement("[3, 0, 1, 2]", 4) == Arrangement((3, 0, 1, 2))
    assert parse_arrangement(str(DOCS / "fig1.mwa.result.json"), 4) == Arrangement((0, 1, 3, 2))
    with pytest.raises(ArgumentError):
        parse_arrangement("0,1", 4)


def test_figure1_names_survive(tmp_path):
    inst = gen_figure1()
    back, _ = instance_from_dict(instance_to_dict(inst))
    assert [back.agent_name(p) for p in range(4)] == ["p1", "p2", "p3", "p4"]
