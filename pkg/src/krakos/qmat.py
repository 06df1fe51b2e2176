"""Dense complex linear algebra on small qubit-register matrices.

Matrices are plain ``numpy`` complex128 arrays. Qubit 0 is the most
significant bit of a computational-basis index, so ``tensor(a, b)`` places
``a`` on the lower-numbered qubits. Every routine here is a pure function of
its inputs; random sampling takes an explicit 64-bit seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, NamedTuple

import numpy as np

from krakos.errors import (
    InvalidBipartition,
    InvalidInput,
    InvalidOptions,
    NotHermitian,
    NotUnitary,
)

if TYPE_CHECKING:
    from krakos.entanglement import Bipartition

UNITARY_TOL = 1e-10
STATE_NORM_TOL = 1e-12
JACOBI_TOL = 1e-12
MAX_QUBITS = 5
SEED_MAX = 2**64 - 1


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite complex128 2-D array, raising InvalidInput otherwise."""
    arr = np.array(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInput(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("matrix has non-finite entries")
    return arr


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= SEED_MAX:
        raise InvalidOptions(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def _qubits_for_dim(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 2 or 1 << n != dim:
        raise InvalidInput(f"dimension {dim} is not a power of two")
    return n


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128)
    arr.setflags(write=False)
    return arr


def unitarity_residual(m: np.ndarray) -> float:
    m = np.asarray(m)
    return float(np.linalg.norm(m.conj().T @ m - np.eye(m.shape[0])))


@dataclass(frozen=True, eq=False)
class UnitaryGate:
    """A 2^n x 2^n unitary acting on ``num_qubits`` qubits."""

    matrix: np.ndarray
    num_qubits: int

    def __init__(self, matrix, num_qubits: int | None = None):
        arr = as_matrix(matrix)
        if arr.shape[0] != arr.shape[1]:
            raise InvalidInput(f"gate matrix must be square, got {arr.shape}")
        n = _qubits_for_dim(arr.shape[0])
        if num_qubits is not None and num_qubits != n:
            raise InvalidInput(f"declared {num_qubits} qubits but matrix is {arr.shape[0]}-dimensional")
        residual = unitarity_residual(arr)
        if residual > UNITARY_TOL:
            raise NotUnitary(residual)
        object.__setattr__(self, "matrix", _frozen(arr))
        object.__setattr__(self, "num_qubits", n)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def adjoint(self) -> UnitaryGate:
        return UnitaryGate(self.matrix.conj().T)

    def __matmul__(self, other: UnitaryGate) -> UnitaryGate:
        if not isinstance(other, UnitaryGate):
            return NotImplemented
        if other.dim != self.dim:
            raise InvalidInput("gates act on different numbers of qubits")
        return UnitaryGate(self.matrix @ other.matrix)

    def tensor(self, other: UnitaryGate) -> UnitaryGate:
        return UnitaryGate(tensor(self.matrix, other.matrix))

    def apply(self, psi: PureState) -> PureState:
        if psi.dim != self.dim:
            raise InvalidInput(f"{self.num_qubits}-qubit gate applied to {psi.num_qubits}-qubit state")
        return PureState(self.matrix @ psi.amplitudes)

    def allclose(self, other: UnitaryGate, atol: float = 1e-12) -> bool:
        return self.dim == other.dim and bool(np.allclose(self.matrix, other.matrix, rtol=0, atol=atol))

    def __repr__(self) -> str:
        return f"UnitaryGate(num_qubits={self.num_qubits})"


@dataclass(frozen=True, eq=False)
class PureState:
    """A normalized state vector of length 2^n."""

    amplitudes: np.ndarray
    num_qubits: int

    def __init__(self, amplitudes, num_qubits: int | None = None, normalize: bool = False):
        vec = np.array(amplitudes, dtype=np.complex128).reshape(-1)
        if not np.all(np.isfinite(vec)):
            raise InvalidInput("state has non-finite amplitudes")
        n = _qubits_for_dim(vec.shape[0]) if vec.shape[0] > 1 else 0
        if n == 0:
            raise InvalidInput("a state needs at least one qubit")
        if num_qubits is not None and num_qubits != n:
            raise InvalidInput(f"declared {num_qubits} qubits but vector has length {vec.shape[0]}")
        norm = float(np.linalg.norm(vec))
        if normalize:
            if norm == 0.0:
                raise InvalidInput("cannot normalize the zero vector")
            vec = vec / norm
        elif abs(norm * norm - 1.0) > STATE_NORM_TOL:
            raise InvalidInput(f"state is not normalized (squared norm {norm * norm!r})")
        vec.setflags(write=False)
        object.__setattr__(self, "amplitudes", vec)
        object.__setattr__(self, "num_qubits", n)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def tensor(self, other: PureState) -> PureState:
        return PureState(np.kron(self.amplitudes, other.amplitudes))

    def __repr__(self) -> str:
        return f"PureState(num_qubits={self.num_qubits})"


def tensor(a, b) -> np.ndarray:
    """Kronecker product; block (i, j) of the result is ``a[i, j] * b``."""
    return np.kron(as_matrix(a), as_matrix(b))


def tensor_all(*factors) -> np.ndarray:
    out = as_matrix(factors[0])
    for f in factors[1:]:
        out = np.kron(out, as_matrix(f))
    return out


def partial_trace(rho, cut: Bipartition, keep: str = "a") -> np.ndarray:
    """Reduced density matrix of one side of ``cut``.

    ``keep`` is ``"a"`` or ``"b"``. Kept qubits stay in ascending index
    order in the result.
    """
    rho = as_matrix(rho)
    n = cut.num_qubits
    if rho.shape != (1 << n, 1 << n):
        raise InvalidBipartition(f"{n}-qubit cut applied to a {rho.shape[0]}-dimensional matrix")
    if keep not in ("a", "b"):
        raise InvalidOptions(f"keep must be 'a' or 'b', got {keep!r}")
    kept = list(cut.side_a if keep == "a" else cut.side_b)
    traced = list(cut.side_b if keep == "a" else cut.side_a)
    t = rho.reshape((2,) * (2 * n))
    order = kept + traced + [n + q for q in kept] + [n + q for q in traced]
    t = t.transpose(order)
    dk, dt = 1 << len(kept), 1 << len(traced)
    t = t.reshape(dk, dt, dk, dt)
    return np.einsum("ijkj->ik", t)


def _is_hermitian(h: np.ndarray, tol: float) -> bool:
    return h.shape[0] == h.shape[1] and float(np.max(np.abs(h - h.conj().T))) <= tol


def hermitian_eigenvalues(h, tol: float = 1e-10) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix by cyclic Jacobi rotations.

    Each (p, q) pivot is first made real by a diagonal phase, then zeroed by
    a real plane rotation. Sweeps run until the off-diagonal Frobenius
    residual drops below ``1e-12`` (relative to the matrix norm when that
    exceeds one).
    """
    h = as_matrix(h)
    if not _is_hermitian(h, tol):
        raise NotHermitian("matrix is not Hermitian within tolerance")
    return _jacobi_eigenvalues(h)


def _jacobi_eigenvalues(h: np.ndarray) -> np.ndarray:
    n = h.shape[0]
    if n == 1:
        return np.array([h[0, 0].real])
    if n == 2:
        # One rotation annihilates the only off-diagonal pair.
        (x, z), (_, y) = h.tolist()
        x, y, mag = x.real, y.real, abs(z)
        if mag < 1e-300:
            return np.array(sorted((x, y)))
        theta = (y - x) / (2.0 * mag)
        t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.sqrt(theta * theta + 1.0))
        return np.array(sorted((x - t * mag, y + t * mag)))
    a = h.tolist()
    d = [a[i][i].real for i in range(n)]
    scale = max(1.0, math.sqrt(sum(abs(x) ** 2 for row in a for x in row)))
    threshold = JACOBI_TOL * scale
    for _sweep in range(100):
        off = 0.0
        for p in range(n):
            row = a[p]
            for q in range(p + 1, n):
                z = row[q]
                off += z.real * z.real + z.imag * z.imag
        if math.sqrt(2.0 * off) < threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p][q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                phase = apq / mag
                theta = (d[q] - d[p]) / (2.0 * mag)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                d[p] -= t * mag
                d[q] += t * mag
                a[p][q] = a[q][p] = 0j
                pc = phase.conjugate()
                for r in range(n):
                    if r == p or r == q:
                        continue
                    arp = a[r][p]
                    arq = a[r][q] * pc
                    new_rp = c * arp - s * arq
                    new_rq = (s * arp + c * arq) * phase
                    a[r][p] = new_rp
                    a[p][r] = new_rp.conjugate()
                    a[r][q] = new_rq
                    a[q][r] = new_rq.conjugate()
    return np.sort(np.array(d))


class Norms(NamedTuple):
    frobenius: float
    spectral: float


def frobenius_norm(m) -> float:
    m = np.asarray(m)
    return float(math.sqrt(float(np.sum(m.real**2 + m.imag**2))))


def spectral_norm(m) -> float:
    m = as_matrix(m)
    gram = m.conj().T @ m
    gram = 0.5 * (gram + gram.conj().T)
    top = float(_jacobi_eigenvalues(gram)[-1])
    return math.sqrt(max(top, 0.0))


def norms(m) -> Norms:
    m = as_matrix(m)
    return Norms(frobenius_norm(m), spectral_norm(m))


def _check_qubits(n: int) -> int:
    n = int(n)
    if not 1 <= n <= MAX_QUBITS:
        raise InvalidOptions(f"qubit count must be in [1, {MAX_QUBITS}], got {n}")
    return n


def haar_random_unitary(n: int, seed: int) -> UnitaryGate:
    """Haar-distributed unitary: QR of a complex Ginibre matrix, phases fixed by diag(R)."""
    n = _check_qubits(n)
    rng = np.random.default_rng(check_seed(seed))
    dim = 1 << n
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    q = q * (diag / np.abs(diag))
    return UnitaryGate(q)


def random_pure_state(n: int, seed: int) -> PureState:
    n = _check_qubits(n)
    rng = np.random.default_rng(check_seed(seed))
    dim = 1 << n
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState(v, normalize=True)


def haar_local_product(num_qubits: int, seed: int) -> UnitaryGate:
    """Tensor product of independent Haar single-qubit unitaries."""
    n = _check_qubits(num_qubits)
    seq = np.random.SeedSequence(check_seed(seed))
    sub = seq.generate_state(n, np.uint64)
    factors = [haar_random_unitary(1, int(s)).matrix for s in sub]
    return UnitaryGate(tensor_all(*factors))


def identity(n: int) -> UnitaryGate:
    return UnitaryGate(np.eye(1 << n))
