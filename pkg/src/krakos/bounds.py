"""Lower bounds on the CNOT count of a gate from its strength.

For a measure with chaining, stability and locality, a circuit of ``M``
CNOTs and single-qubit gates satisfies ``K(U) <= M * K(CNOT)``, hence
``M >= K(U) / K(CNOT)``. With k_delta across a cut, only CNOTs that straddle
the cut contribute, so the bound counts cut-crossing CNOTs.

Soundness needs a numerator that under-estimates and an exact denominator.
k_delta qualifies: the optimizer value is achieved by a witness state and
``K_delta(CNOT) = 1`` exactly (the witness |+>|0> reaches the one-ebit
ceiling). k_distance is optimized from above, so its bounds are flagged
unsound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from krakos.entanglement import Bipartition
from krakos.gates import CNOT
from krakos.qmat import UnitaryGate, tensor_all
from krakos.strength import LOWER_BOUND, Measure, OptimizerOptions, StrengthReport

SLACK = 1e-6
K_DELTA_CNOT = 1.0
# sqrt(8 - 4 sqrt 2): analytic optimum, confirmed by scripts/oracle_kdist_cnot.py
K_DISTANCE_CNOT_FROBENIUS = math.sqrt(8.0 - 4.0 * math.sqrt(2.0))

KNOWN_CNOT_COST = {"CNOT": 1, "CZ": 1, "SWAP": 3}

BLIND_NOTE = (
    "k-delta bound is 0: the gate changes no entanglement across this cut, "
    "which does not imply a CNOT-free implementation (SWAP needs 3)"
)


@dataclass(frozen=True)
class CnotBound:
    lower_bound: int
    strength_used: StrengthReport
    k_cnot: float
    k_cnot_source: str
    sound: bool
    note: str = ""


def bound_from_values(strength_value: float, k_cnot: float) -> int:
    return max(0, math.ceil(strength_value / k_cnot - SLACK))


def _embedded_cnot(num_qubits: int) -> UnitaryGate:
    if num_qubits == 2:
        return CNOT
    return UnitaryGate(tensor_all(CNOT.matrix, np.eye(1 << (num_qubits - 2))))


def cnot_lower_bound(
    u: UnitaryGate,
    cut: Bipartition | None = None,
    measure: Measure = Measure(),
    opts: OptimizerOptions | None = None,
) -> CnotBound:
    opts = opts or OptimizerOptions()
    report = measure.evaluate(u, opts, cut)
    if measure.kind == "kdelta":
        k_cnot, source, exact = K_DELTA_CNOT, "analytic: witness |+>|0> reaches the 1-ebit ceiling", True
    elif measure.metric.kind == "frobenius-raw" and measure.metric.phase_optimized and u.num_qubits == 2:
        k_cnot, source, exact = K_DISTANCE_CNOT_FROBENIUS, "analytic: sqrt(8 - 4 sqrt 2)", True
    else:
        k_cnot = measure.evaluate(_embedded_cnot(u.num_qubits), opts).value
        source, exact = f"numeric: {measure.id} of CNOT on {u.num_qubits} qubits", False
    sound = report.direction == LOWER_BOUND and exact
    m = bound_from_values(report.value, k_cnot)
    note = BLIND_NOTE if measure.kind == "kdelta" and m == 0 else ""
    if not sound:
        note = "unsound: k-distance is an upper estimate of a minimum, so the ratio may overstate M"
    return CnotBound(m, report, k_cnot, source, sound, note)
