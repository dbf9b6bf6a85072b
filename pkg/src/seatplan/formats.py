"""JSON instance and result files.

Rationals are written as decimal strings when exact, otherwise ``"num/den"``.
See docs/format.md for the normative description.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional, Union

from .model import (
    Arrangement,
    ArgumentError,
    Instance,
    PreferenceProfile,
    SeatGraph,
    format_rational,
    to_rational,
)
from .oracle import SolveOutcome

PathLike = Union[str, Path]


def instance_to_dict(inst: Instance, metadata: Optional[dict] = None) -> dict:
    doc = {
        "agents": [inst.agent_name(p) for p in range(inst.n)],
        "preferences": [
            {"from": p, "to": q, "value": format_rational(w)} for (p, q), w in inst.profile.arcs.items()
        ],
        "seats": {"n": inst.seats.n, "edges": [list(e) for e in inst.seats.sorted_edges()]},
    }
    if metadata:
        doc["metadata"] = metadata
    return doc


def _int(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ArgumentError(f"{what} must be an integer, got {value!r}")
    return value


def instance_from_dict(doc: dict) -> tuple[Instance, dict]:
    if not isinstance(doc, dict):
        raise ArgumentError("instance document must be a JSON object")
    try:
        seats_doc = doc["seats"]
        n = _int(seats_doc["n"], "seats.n")
        edges = [tuple(_int(x, "edge endpoint") for x in e) for e in seats_doc.get("edges", [])]
        if any(len(e) != 2 for e in edges):
            raise ArgumentError("every edge needs exactly two endpoints")
        agents = doc.get("agents")
        if agents is None:
            agents = [f"p{i + 1}" for i in range(n)]
        if not isinstance(agents, list) or len(agents) != n:
            raise ArgumentError(f"'agents' must list exactly {n} names")
        arcs = {}
        for entry in doc.get("preferences", []):
            p, q = _int(entry["from"], "from"), _int(entry["to"], "to")
            if (p, q) in arcs:
                raise ArgumentError(f"duplicate preference ({p}, {q})")
            arcs[(p, q)] = to_rational(entry["value"])
    except (KeyError, TypeError) as exc:
        raise ArgumentError(f"malformed instance document: {exc}") from exc
    inst = Instance(PreferenceProfile(n, arcs), SeatGraph.from_edges(n, edges), tuple(agents))
    return inst, dict(doc.get("metadata") or {})


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def save_instance(inst: Instance, path: PathLike, metadata: Optional[dict] = None) -> None:
    Path(path).write_text(dumps(instance_to_dict(inst, metadata)), encoding="utf-8")


def load_instance(path: PathLike) -> tuple[Instance, dict]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ArgumentError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ArgumentError(f"{path} is not valid JSON: {exc}") from exc
    return instance_from_dict(doc)


def outcome_to_dict(out: SolveOutcome, wall_time_ms: Optional[int] = None) -> dict:
    return {
        "problem": out.problem,
        "algorithm": out.algorithm,
        "value": None if out.value is None else format_rational(out.value),
        "exists": out.exists,
        "certificate": None if out.certificate is None else list(out.certificate.assignment),
        "seed": out.seed,
        "trials_run": out.trials_run,
        "wall_time_ms": wall_time_ms,
    }


def outcome_from_dict(doc: dict, inst: Optional[Instance] = None) -> SolveOutcome:
    """Parse a result file; with ``inst`` the certificate is re-validated."""
    try:
        cert = doc.get("certificate")
        out = SolveOutcome(
            problem=doc["problem"],
            algorithm=doc["algorithm"],
            value=None if doc.get("value") is None else to_rational(doc["value"]),
            exists=doc.get("exists"),
            certificate=None if cert is None else Arrangement(tuple(cert)),
            trials_run=int(doc.get("trials_run", 0)),
            seed=int(doc.get("seed", 0)),
        )
    except (KeyError, TypeError) as exc:
        raise ArgumentError(f"malformed result document: {exc}") from exc
    if inst is not None and out.certificate is not None and not out.verify(inst):
        raise ArgumentError("result certificate does not reproduce the stated answer")
    return out


def parse_arrangement(text: str, n: int) -> Arrangement:
    """An arrangement given inline (``"0,1,3,2"``), as a JSON list, or as a result file path."""
    text = text.strip()
    if text and (text[0].isdigit() or text[0] == "["):
        try:
            seats = json.loads(text) if text[0] == "[" else [int(x) for x in text.split(",")]
        except (ValueError, json.JSONDecodeError) as exc:
            raise ArgumentError(f"cannot parse arrangement {text!r}") from exc
    else:
        try:
            doc = json.loads(Path(text).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ArgumentError(f"cannot read {text}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise ArgumentError(f"{text} is not valid JSON") from exc
        seats = doc.get("certificate") if isinstance(doc, dict) else doc
    if not isinstance(seats, list) or len(seats) != n:
        raise ArgumentError(f"arrangement must list one seat for each of the {n} agents")
    return Arrangement(tuple(_int(s, "seat") for s in seats))
