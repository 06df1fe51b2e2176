"""Named gates and the gate-spec text grammar used by the CLI.

A gate spec is either an expression of named gates joined by a tensor
operator, e.g. ``CNOT``, ``CPHASE(pi/2)``, ``CNOT ⊗ CNOT`` (``(x)`` is the
ASCII spelling of ``⊗``), or an inline JSON matrix of ``[re, im]`` pairs::

    {"num_qubits": 1, "matrix": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]}

A bare JSON list of rows is accepted too; the qubit count is then inferred.
"""

from __future__ import annotations

import json
import math
import re

import numpy as np

from krakos.errors import InvalidInput, NotUnitary, ParseError
from krakos.qmat import UnitaryGate, tensor_all, unitarity_residual, UNITARY_TOL

_S = 1 / math.sqrt(2)

NAMED_GATES: dict[str, np.ndarray] = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[_S, _S], [_S, -_S]], dtype=complex),
    "CNOT": np.eye(4, dtype=complex)[[0, 1, 3, 2]],
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.eye(4, dtype=complex)[[0, 2, 1, 3]],
}
PARAMETRIC_GATES = ("CPHASE",)


def cphase(theta: float) -> UnitaryGate:
    return UnitaryGate(np.diag([1, 1, 1, np.exp(1j * theta)]))


def named_gate(name: str) -> UnitaryGate:
    try:
        return UnitaryGate(NAMED_GATES[name.upper()])
    except KeyError:
        raise InvalidInput(f"unknown gate {name!r}") from None


CNOT = named_gate("CNOT")
CZ = named_gate("CZ")
SWAP = named_gate("SWAP")

_NUM = r"(?:\d+\.?\d*(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?|pi\b)"
_TOKEN = re.compile(
    r"\s*(?:(?P<tensor>⊗|\(x\))"
    rf"|(?P<number>[-+]?{_NUM}(?:\s*[*/]\s*{_NUM})*)"
    r"|(?P<name>[A-Za-z_]+)|(?P<lparen>\()|(?P<rparen>\)))"
)


def _eval_number(text: str) -> float:
    parts = re.split(r"\s*([*/])\s*", text)
    value = _atom(parts[0])
    for op, operand in zip(parts[1::2], parts[2::2]):
        value = value * _atom(operand) if op == "*" else value / _atom(operand)
    return value


def _atom(text: str) -> float:
    sign = -1.0 if text.startswith("-") else 1.0
    body = text.lstrip("+-")
    return sign * (math.pi if body == "pi" else float(body))


def _tokenize(text: str):
    pos = 0
    stripped_end = len(text.rstrip())
    while pos < stripped_end:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise ParseError(f"unexpected character {text[col - 1]!r}", 1, col)
        kind = m.lastgroup
        start = m.start(kind) + 1
        yield kind, m.group(kind), start
        pos = m.end()


def _parse_expression(text: str) -> UnitaryGate:
    tokens = list(_tokenize(text))
    if not tokens:
        raise ParseError("empty gate spec", 1, 1)
    factors = []
    i = 0
    expect_term = True
    while i < len(tokens):
        kind, value, col = tokens[i]
        if expect_term:
            if kind != "name":
                raise ParseError(f"expected a gate name, got {value!r}", 1, col)
            name = value.upper()
            if name in PARAMETRIC_GATES:
                window = tokens[i + 1: i + 4]
                for want, tok in zip(("lparen", "number", "rparen"), window):
                    if tok[0] != want:
                        raise ParseError(f"{name} needs a numeric parameter, e.g. {name}(pi)", 1, tok[2])
                if len(window) < 3:
                    raise ParseError(f"{name} parameter list is not closed", 1, len(text.rstrip()) + 1)
                factors.append(cphase(_eval_number(window[1][1])))
                i += 4
            elif name in NAMED_GATES:
                factors.append(named_gate(name))
                i += 1
            else:
                raise ParseError(f"unknown gate {value!r}", 1, col)
            expect_term = False
        else:
            if kind != "tensor":
                raise ParseError(f"expected ⊗ between gates, got {value!r}", 1, col)
            expect_term = True
            i += 1
    if expect_term:
        raise ParseError("gate spec ends with a dangling tensor operator", 1, len(text.rstrip()) + 1)
    return UnitaryGate(tensor_all(*(f.matrix for f in factors)))


def matrix_from_pairs(rows) -> np.ndarray:
    try:
        arr = np.array(rows, dtype=float)
    except (TypeError, ValueError):
        raise ParseError("matrix must be a list of rows of [re, im] pairs") from None
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise ParseError(f"matrix must be square rows of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def matrix_to_pairs(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def _parse_inline(text: str) -> UnitaryGate:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    declared = None
    if isinstance(doc, dict):
        if "matrix" not in doc:
            raise ParseError("inline gate object needs a 'matrix' field")
        declared = doc.get("num_qubits")
        doc = doc["matrix"]
    m = matrix_from_pairs(doc)
    residual = unitarity_residual(m)
    if residual > UNITARY_TOL:
        raise NotUnitary(residual, f"inline matrix is not unitary (residual ||U^dag U - I||_F = {residual:.6g})")
    return UnitaryGate(m, declared)


def parse_gate_spec(text: str) -> UnitaryGate:
    """Build a gate from spec text; raises ParseError or NotUnitary."""
    body = text.strip()
    if body.startswith(("{", "[")):
        return _parse_inline(text)
    return _parse_expression(text)


def gate_to_text(gate: UnitaryGate) -> str:
    """Inline JSON form of ``gate``; :func:`parse_gate_spec` reads it back exactly."""
    return json.dumps({"num_qubits": gate.num_qubits, "matrix": matrix_to_pairs(gate.matrix)})
