"""Command-line interface: solve, check, generate, classify, bench."""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from . import efa, esa, mua, mwa
from .formats import (
    dumps,
    instance_to_dict,
    load_instance,
    outcome_to_dict,
    parse_arrangement,
    save_instance,
)
from .generators import (
    KINDS,
    PREF_KINDS,
    SEAT_KINDS,
    GeneratorSpec,
    gen_clique_to_mwa,
    gen_figure1,
    gen_ham_to_mwa,
    gen_is_to_esa,
    gen_planted_efa,
    gen_random,
    random_seat_graph,
)
from .model import (
    SEAT_CLASSES,
    ArgumentError,
    SeatplanError,
    check_envy_free,
    check_exchange_stable,
    egalitarian,
    format_rational,
    to_rational,
    utilities,
    welfare,
)
from .oracle import PROBLEMS, DispatchError, ResourceError, SolverConfig, oracle_solve
from .solve import solve

EXIT_OK, EXIT_THRESHOLD, EXIT_ARGS, EXIT_RESOURCE = 0, 1, 2, 3

ALGORITHMS = sorted({"auto", *mwa.ALGORITHMS, *mua.ALGORITHMS, *efa.ALGORITHMS, *esa.ALGORITHMS})


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ArgumentError(message)


def _emit(doc, out: Optional[str] = None) -> None:
    text = dumps(doc)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _config(args) -> SolverConfig:
    if not (0 < args.delta < 1):
        raise ArgumentError("--delta must lie strictly between 0 and 1")
    if args.threads < 1:
        raise ArgumentError("--threads must be at least 1")
    return SolverConfig(
        algorithm=args.algorithm,
        seed=args.seed,
        delta=args.delta,
        max_trials=args.max_trials,
        oracle_cap=args.oracle_cap,
    )


def cmd_solve(args) -> int:
    inst, _ = load_instance(args.input)
    if args.threshold is not None and args.problem in ("efa", "esa"):
        raise ArgumentError("--threshold applies to mwa and mua only")
    threshold = None if args.threshold is None else to_rational(args.threshold)
    start = time.perf_counter()
    out = solve(args.problem, inst, _config(args))
    ms = round((time.perf_counter() - start) * 1000)
    _emit(outcome_to_dict(out, ms), args.out)
    if threshold is not None and out.value < threshold:
        return EXIT_THRESHOLD
    return EXIT_OK


def cmd_check(args) -> int:
    inst, _ = load_instance(args.input)
    arr = parse_arrangement(args.arrangement, inst.n)
    doc: dict = {"concept": args.concept}
    if args.concept in ("ef", "es"):
        verdict = check_envy_free(inst, arr) if args.concept == "ef" else check_exchange_stable(inst, arr)
        doc["holds"] = verdict.holds
        doc["witness"] = None if verdict.witness is None else [inst.agent_name(p) for p in verdict.witness]
        doc["witness_indices"] = None if verdict.witness is None else list(verdict.witness)
    else:
        value = welfare(inst, arr) if args.concept == "welfare" else egalitarian(inst, arr)
        doc["value"] = format_rational(value)
    doc["utilities"] = [format_rational(u) for u in utilities(inst, arr)]
    _emit(doc, args.out)
    return EXIT_OK


def _read_graph(text: str) -> tuple[int, list[tuple[int, int]]]:
    """``"n:u-v,u-v"`` inline, or a JSON file ``{"n": .., "edges": [[u, v], ..]}``."""
    if ":" in text and not Path(text).exists():
        head, _, body = text.partition(":")
        try:
            n = int(head)
            edges = [tuple(int(x) for x in e.split("-")) for e in body.split(",") if e.strip()]
        except ValueError as exc:
            raise ArgumentError(f"cannot parse graph {text!r}") from exc
        return n, edges
    try:
        doc = json.loads(Path(text).read_text(encoding="utf-8"))
        return int(doc["n"]), [tuple(e) for e in doc["edges"]]
    except (OSError, KeyError, ValueError, TypeError) as exc:
        raise ArgumentError(f"cannot read graph from {text!r}") from exc


def cmd_generate(args) -> int:
    meta: dict = {}
    if args.kind == "figure1":
        inst = gen_figure1()
    elif args.kind == "random":
        if args.n is None or args.k is None:
            raise ArgumentError("random instances need --n and --k")
        spec = GeneratorSpec(n=args.n, k=args.k, seats=args.seats, prefs=args.prefs,
                             delta_cap=args.delta_cap, low=args.low, high=args.high,
                             density=args.density, seed=args.seed)
        inst = gen_random(spec)
        meta = {"kind": "random", "seed": args.seed}
    elif args.kind == "planted_efa":
        if args.n is None or args.k is None:
            raise ArgumentError("planted_efa needs --n and --k")
        seats = random_seat_graph(args.n, args.k, args.seats, random.Random(args.seed))
        g = gen_planted_efa(args.n, seats, seed=args.seed, high=max(args.high, 1),
                            delta_cap=args.delta_cap if args.delta_cap is not None else 2)
        inst, meta = g.instance, g.metadata
    else:
        if args.graph is None:
            raise ArgumentError(f"{args.kind} needs --graph")
        n, edges = _read_graph(args.graph)
        if args.kind == "ham_to_mwa":
            g = gen_ham_to_mwa(n, edges)
        else:
            if args.h is None:
                raise ArgumentError(f"{args.kind} needs --h")
            g = (gen_clique_to_mwa if args.kind == "clique_to_mwa" else gen_is_to_esa)(n, edges, args.h)
        inst, meta = g.instance, g.metadata
    if args.out:
        save_instance(inst, args.out, meta)
    else:
        _emit(instance_to_dict(inst, meta))
    return EXIT_OK


def classify_doc(inst) -> dict:
    a, pa = inst.seat_analysis, inst.preference_analysis
    return {
        "n": inst.n,
        "k": a.k,
        "delta_plus": pa.delta_plus,
        "classes": [c for c in SEAT_CLASSES if c in a.classes],
        "preferences": pa.flags(),
        "nonisolated": list(a.nonisolated),
        "components": [list(c) for c in a.components],
    }


def cmd_classify(args) -> int:
    inst, _ = load_instance(args.input)
    _emit(classify_doc(inst), args.out)
    return EXIT_OK


# bench -----------------------------------------------------------------------------

_SPECIALIZED = {"mwa": mwa.SOLVERS, "mua": mua.SOLVERS, "efa": efa.SOLVERS, "esa": esa.SOLVERS}

SUITES = {
    "smoke": [
        ("path", "general", 6, 4, None),
        ("stars", "general", 6, 3, None),
        ("clique", "nonneg", 6, 3, None),
        ("matching", "general", 6, 2, 2),
    ],
    "classes": [
        (seats, prefs, n, k, cap)
        for seats, k in (("path", 4), ("cycle", 4), ("stars", 4), ("clique", 3), ("matching", 4))
        for prefs, cap in (("general", 2), ("nonneg", 2), ("symmetric", 1))
        for n in (6, 7)
    ],
}


def _bench_rows(suite: str, seed: int, config: SolverConfig):
    for idx, (seats, prefs, n, k, cap) in enumerate(SUITES[suite]):
        spec = GeneratorSpec(n=n, k=k, seats=seats, prefs=prefs, delta_cap=cap, seed=seed + idx)
        inst = gen_random(spec)
        name = f"{suite}-{idx:02d}-{seats}-{prefs}-n{n}-k{k}"
        for problem in PROBLEMS:
            t0 = time.perf_counter()
            ref = oracle_solve(problem, inst, config.oracle_cap)
            ref_ms = (time.perf_counter() - t0) * 1000
            ref_answer = ref.value if problem in ("mwa", "mua") else ref.exists
            yield name, problem, "oracle", ref_answer, True, ref_ms
            for algo, fn in _SPECIALIZED[problem].items():
                t0 = time.perf_counter()
                try:
                    got = fn(inst, config)
                except (DispatchError, ResourceError):
                    continue
                ms = (time.perf_counter() - t0) * 1000
                answer = got.value if problem in ("mwa", "mua") else got.exists
                yield name, problem, algo, answer, answer == ref_answer, ms


def cmd_bench(args) -> int:
    if args.suite not in SUITES:
        raise ArgumentError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    config = SolverConfig(seed=args.seed, delta=args.delta)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for name, problem, algo, answer, agrees, ms in _bench_rows(args.suite, args.seed, config):
        shown = format_rational(answer) if problem in ("mwa", "mua") else str(answer).lower()
        rows.append({"instance": name, "problem": problem, "algorithm": algo,
                     "answer": shown, "agrees_with_oracle": agrees, "ms": f"{ms:.2f}"})
    with open(out_dir / "bench.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    mismatches = sum(1 for r in rows if not r["agrees_with_oracle"])
    summary = {"suite": args.suite, "rows": len(rows), "mismatches": mismatches,
               "csv": str(out_dir / "bench.csv")}
    _emit(summary)
    return EXIT_OK if mismatches == 0 else EXIT_THRESHOLD


# entry point -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="seatplan", description="Seat arrangement solvers.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="solve mwa, mua, efa or esa")
    s.add_argument("--problem", required=True, choices=PROBLEMS)
    s.add_argument("--input", required=True)
    s.add_argument("--algorithm", default="auto", choices=ALGORITHMS)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--delta", type=float, default=1e-6, help="failure probability for randomized solvers")
    s.add_argument("--threshold", help="exit 1 unless the optimum reaches this value (mwa, mua)")
    s.add_argument("--max-trials", type=int, default=10_000_000)
    s.add_argument("--oracle-cap", type=int, default=10**8)
    s.add_argument("--threads", type=int, default=1,
                   help="worker count; solvers currently run on one thread and output never depends on it")
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    c = sub.add_parser("check", help="evaluate an arrangement")
    c.add_argument("--input", required=True)
    c.add_argument("--arrangement", required=True,
                   help="seat per agent, e.g. 0,1,3,2, a JSON list, or a result file")
    c.add_argument("--concept", required=True, choices=("ef", "es", "welfare", "egal"))
    c.add_argument("--out")
    c.set_defaults(func=cmd_check)

    g = sub.add_parser("generate", help="write an instance file")
    g.add_argument("--kind", required=True, choices=KINDS)
    g.add_argument("--out")
    g.add_argument("--n", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--seats", default="path", choices=SEAT_KINDS)
    g.add_argument("--prefs", default="general", choices=PREF_KINDS)
    g.add_argument("--delta-cap", type=int)
    g.add_argument("--low", type=int, default=-3)
    g.add_argument("--high", type=int, default=5)
    g.add_argument("--density", type=float, default=0.5)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--graph", help='source graph: "n:u-v,u-v" or a JSON file with n and edges')
    g.add_argument("--h", type=int)
    g.set_defaults(func=cmd_generate)

    k = sub.add_parser("classify", help="report k, Δ⁺, seat classes and preference flags")
    k.add_argument("--input", required=True)
    k.add_argument("--out")
    k.set_defaults(func=cmd_classify)

    b = sub.add_parser("bench", help="time specialized solvers against the oracle")
    b.add_argument("--suite", required=True, choices=sorted(SUITES))
    b.add_argument("--out", required=True)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--delta", type=float, default=1e-6)
    b.set_defaults(func=cmd_bench)
    return p


def _fail(kind: str, exc: Exception, code: int) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": str(exc), "exit_code": code}) + "\n")
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except ResourceError as exc:
        return _fail("resource", exc, EXIT_RESOURCE)
    except SeatplanError as exc:
        return _fail("argument", exc, EXIT_ARGS)


if __name__ == "__main__":
    sys.exit(main())
