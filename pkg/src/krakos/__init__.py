"""Strength measures for quantum gates, their algebraic properties, CNOT-count
bounds, and a chaos-game fern renderer."""

__version__ = "0.1.0"

from krakos.bounds import CnotBound, cnot_lower_bound  # noqa: E402
from krakos.entanglement import Bipartition, entanglement_entropy, von_neumann_entropy  # noqa: E402
from krakos.gates import parse_gate_spec  # noqa: E402
from krakos.qmat import PureState, UnitaryGate, haar_random_unitary, random_pure_state  # noqa: E402
from krakos.strength import (  # noqa: E402
    Measure,
    Metric,
    OptimizerOptions,
    StrengthReport,
    k_delta,
    k_distance,
    metric_distance,
)

__all__ = [
    "Bipartition",
    "CnotBound",
    "Measure",
    "Metric",
    "OptimizerOptions",
    "PureState",
    "StrengthReport",
    "UnitaryGate",
    "cnot_lower_bound",
    "entanglement_entropy",
    "haar_random_unitary",
    "k_delta",
    "k_distance",
    "metric_distance",
    "parse_gate_spec",
    "random_pure_state",
    "von_neumann_entropy",
]
