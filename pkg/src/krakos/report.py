"""JSON (de)serialization of every report type.

Complex numbers become ``[re, im]`` pairs and floats are written with
``repr`` precision, so ``from_dict(to_dict(r))`` reproduces ``r`` exactly.
The document layout is described by ``docs/report-schema.json``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

import numpy as np

from krakos import __version__
from krakos.bounds import CnotBound
from krakos.entanglement import Bipartition
from krakos.errors import InvalidInput
from krakos.fern import BBox, FernStats
from krakos.gates import matrix_from_pairs, matrix_to_pairs
from krakos.properties import PropertyReport, SampleRecord
from krakos.qmat import PureState
from krakos.strength import LocalUnitaryTriple, Metric, OptimizerOptions, StrengthReport

SCHEMA_VERSION = "1"


def _pairs(vec) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(vec)]


def _cut_to_dict(cut: Bipartition | None):
    return None if cut is None else {"num_qubits": cut.num_qubits, "side_a": list(cut.side_a)}


def _cut_from_dict(doc):
    return None if doc is None else Bipartition(doc["num_qubits"], doc["side_a"])


def _options_to_dict(o: OptimizerOptions) -> dict:
    return {"starts": o.starts, "max_iterations": o.max_iterations, "tolerance": o.tolerance, "seed": o.seed}


def _options_from_dict(doc) -> OptimizerOptions:
    return OptimizerOptions(doc["starts"], doc["max_iterations"], doc["tolerance"], doc["seed"])


def strength_to_dict(r: StrengthReport) -> dict:
    if isinstance(r.witness, PureState):
        witness = {"kind": "pure-state", "amplitudes": _pairs(r.witness.amplitudes)}
    else:
        witness = {
            "kind": "local-unitaries",
            "factors": [matrix_to_pairs(f) for f in r.witness.factors],
            "phase": r.witness.phase,
        }
    return {
        "type": "strength",
        "measure": r.measure,
        "value": r.value,
        "direction": r.direction,
        "num_qubits": r.num_qubits,
        "cut": _cut_to_dict(r.cut),
        "metric": None if r.metric is None else {"kind": r.metric.kind, "phase_optimized": r.metric.phase_optimized},
        "witness": witness,
        "starts": r.starts,
        "starts_run": r.starts_run,
        "seed": r.seed,
        "max_iterations": r.max_iterations,
        "converged": r.converged,
        "residual": r.residual,
        "start_values": list(r.start_values),
    }


def strength_from_dict(doc: dict) -> StrengthReport:
    w = doc["witness"]
    if w["kind"] == "pure-state":
        a = np.array(w["amplitudes"], dtype=float)
        witness = PureState(a[:, 0] + 1j * a[:, 1])
    else:
        witness = LocalUnitaryTriple(tuple(matrix_from_pairs(f) for f in w["factors"]), w["phase"])
    m = doc["metric"]
    return StrengthReport(
        measure=doc["measure"],
        value=doc["value"],
        direction=doc["direction"],
        witness=witness,
        num_qubits=doc["num_qubits"],
        cut=_cut_from_dict(doc["cut"]),
        metric=None if m is None else Metric(m["kind"], m["phase_optimized"]),
        starts=doc["starts"],
        starts_run=doc["starts_run"],
        seed=doc["seed"],
        max_iterations=doc["max_iterations"],
        converged=doc["converged"],
        residual=doc["residual"],
        start_values=tuple(doc["start_values"]),
    )


def property_to_dict(r: PropertyReport) -> dict:
    return {
        "type": "property",
        "property": r.property,
        "measure": r.measure,
        "samples": r.samples,
        "tolerance": r.tolerance,
        "violations": r.violations,
        "worst_excess": r.worst_excess,
        "num_qubits": r.num_qubits,
        "options": _options_to_dict(r.options),
        "transient": list(r.transient),
        "details": [
            {
                "index": d.index,
                "seeds": list(d.seeds),
                "lhs": d.lhs,
                "rhs": d.rhs,
                "starts": d.starts,
                "label": d.label,
                "side_a": list(d.side_a),
                "initial_lhs": d.initial_lhs,
                "initial_rhs": d.initial_rhs,
            }
            for d in r.details
        ],
    }


def property_from_dict(doc: dict) -> PropertyReport:
    return PropertyReport(
        property=doc["property"],
        measure=doc["measure"],
        samples=doc["samples"],
        tolerance=doc["tolerance"],
        violations=doc["violations"],
        worst_excess=doc["worst_excess"],
        details=tuple(
            SampleRecord(
                d["index"], tuple(d["seeds"]), d["lhs"], d["rhs"], d["starts"], d["label"],
                tuple(d["side_a"]), d["initial_lhs"], d["initial_rhs"],
            )
            for d in doc["details"]
        ),
        options=_options_from_dict(doc["options"]),
        num_qubits=doc["num_qubits"],
        transient=tuple(doc["transient"]),
    )


def bound_to_dict(b: CnotBound) -> dict:
    return {
        "type": "cnot-bound",
        "lower_bound": b.lower_bound,
        "k_cnot": b.k_cnot,
        "k_cnot_source": b.k_cnot_source,
        "sound": b.sound,
        "note": b.note,
        "strength_used": strength_to_dict(b.strength_used),
    }


def bound_from_dict(doc: dict) -> CnotBound:
    return CnotBound(
        doc["lower_bound"], strength_from_dict(doc["strength_used"]), doc["k_cnot"],
        doc["k_cnot_source"], doc["sound"], doc["note"],
    )


def fern_to_dict(s: FernStats) -> dict:
    return {
        "type": "fern",
        "iterations": s.iterations,
        "burn_in": s.burn_in,
        "seed": s.seed,
        "points": s.points,
        "map_counts": list(s.map_counts),
        "bbox": list(s.bbox),
        "inside_fraction": s.inside_fraction,
        "x_range": list(s.x_range),
        "y_range": list(s.y_range),
        "nonzero_fraction": s.nonzero_fraction,
        "width": s.width,
        "height": s.height,
    }


def fern_from_dict(doc: dict) -> FernStats:
    return FernStats(
        doc["iterations"], doc["burn_in"], doc["seed"], doc["points"], tuple(doc["map_counts"]),
        BBox(*doc["bbox"]), doc["inside_fraction"], tuple(doc["x_range"]), tuple(doc["y_range"]),
        doc["nonzero_fraction"], doc["width"], doc["height"],
    )


_ENCODERS = {
    StrengthReport: strength_to_dict,
    PropertyReport: property_to_dict,
    CnotBound: bound_to_dict,
    FernStats: fern_to_dict,
}
_DECODERS = {
    "strength": strength_from_dict,
    "property": property_from_dict,
    "cnot-bound": bound_from_dict,
    "fern": fern_from_dict,
}


def to_dict(obj) -> dict:
    try:
        return _ENCODERS[type(obj)](obj)
    except KeyError:
        raise InvalidInput(f"no serializer for {type(obj).__name__}") from None


def from_dict(doc: dict):
    try:
        decode = _DECODERS[doc["type"]]
    except KeyError:
        raise InvalidInput(f"unknown payload type {doc.get('type')!r}") from None
    return decode(doc)


@dataclass(frozen=True)
class RunReport:
    command: list[str]
    seed: int | None
    wall_time: float
    payload: dict
    version: str = __version__

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "tool": "krakos",
            "version": self.version,
            "command": self.command,
            "seed": self.seed,
            "wall_time_s": self.wall_time,
            "payload": self.payload,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def dumps_payload(payload: dict) -> str:
    """Canonical payload text, used for byte-level reproducibility checks."""
    return json.dumps(payload, sort_keys=True)
