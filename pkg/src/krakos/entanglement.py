"""Von Neumann entanglement entropy across a declared bipartition."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from krakos.errors import InvalidBipartition, NotAState, NotPositive
from krakos.qmat import PureState, _jacobi_eigenvalues, as_matrix, hermitian_eigenvalues

TRACE_TOL = 1e-10
NEGATIVE_CLAMP = 1e-8


@dataclass(frozen=True)
class Bipartition:
    """Split of qubits ``0..num_qubits-1`` into ``side_a`` and its complement."""

    num_qubits: int
    side_a: tuple[int, ...]

    def __init__(self, num_qubits: int, side_a: Iterable[int]):
        n = int(num_qubits)
        a = tuple(sorted({int(q) for q in side_a}))
        if n < 2:
            raise InvalidBipartition(f"a cut needs at least two qubits, got {n}")
        if not a or len(a) >= n:
            raise InvalidBipartition(f"side A must be a nonempty proper subset, got {list(a)}")
        if a[0] < 0 or a[-1] >= n:
            raise InvalidBipartition(f"qubit index out of range for {n} qubits: {list(a)}")
        object.__setattr__(self, "num_qubits", n)
        object.__setattr__(self, "side_a", a)

    @classmethod
    def default(cls, num_qubits: int) -> Bipartition:
        """Qubit 0 against the rest."""
        return cls(num_qubits, (0,))

    @property
    def side_b(self) -> tuple[int, ...]:
        return tuple(q for q in range(self.num_qubits) if q not in self.side_a)

    @property
    def max_entropy(self) -> int:
        return min(len(self.side_a), len(self.side_b))

    def with_ancilla(self, side: str) -> Bipartition:
        """Cut on ``num_qubits + 1`` qubits with the new last qubit joined to ``side``."""
        if side == "a":
            return Bipartition(self.num_qubits + 1, self.side_a + (self.num_qubits,))
        if side == "b":
            return Bipartition(self.num_qubits + 1, self.side_a)
        raise InvalidBipartition(f"ancilla side must be 'a' or 'b', got {side!r}")

    def label(self) -> str:
        fmt = lambda s: "{" + ",".join(map(str, s)) + "}"
        return f"{fmt(self.side_a)}|{fmt(self.side_b)}"


def _entropy_from_spectrum(eigs) -> float:
    total = 0.0
    for lam in eigs:
        lam = min(max(float(lam), 0.0), 1.0)
        if lam > 0.0:
            total -= lam * math.log2(lam)
    return max(total, 0.0)


def von_neumann_entropy(rho) -> float:
    """Entropy in ebits (log base 2) of a density matrix."""
    rho = as_matrix(rho)
    tr = complex(np.trace(rho))
    if abs(tr - 1.0) > TRACE_TOL:
        raise NotAState(f"density matrix trace is {tr}, expected 1")
    eigs = hermitian_eigenvalues(rho)
    if eigs[0] < -NEGATIVE_CLAMP:
        raise NotPositive(f"eigenvalue {eigs[0]:.3e} is negative")
    return _entropy_from_spectrum(eigs)


def _schmidt_matrix(amplitudes: np.ndarray, cut: Bipartition) -> np.ndarray:
    n = cut.num_qubits
    t = amplitudes.reshape((2,) * n).transpose(cut.side_a + cut.side_b)
    return t.reshape(1 << len(cut.side_a), 1 << len(cut.side_b))


def entropy_of_amplitudes(amplitudes: np.ndarray, cut: Bipartition) -> float:
    """Entropy of a (normalized) amplitude vector; no validation, hot path."""
    m = _schmidt_matrix(amplitudes, cut)
    # Reduced state of whichever side is smaller has the same nonzero spectrum.
    rho = m @ m.conj().T if m.shape[0] <= m.shape[1] else m.conj().T @ m
    return _entropy_from_spectrum(_jacobi_eigenvalues(rho))


def entanglement_entropy(psi: PureState, cut: Bipartition) -> float:
    if psi.num_qubits != cut.num_qubits:
        raise InvalidBipartition(
            f"{cut.num_qubits}-qubit cut applied to a {psi.num_qubits}-qubit state"
        )
    return entropy_of_amplitudes(psi.amplitudes, cut)
