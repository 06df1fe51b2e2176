"""Grid-search oracle for the distance from CNOT (and SWAP) to local unitaries.

Evaluates ||U - e^{i phi} A (x) B||_F on a 12-point grid of each of the seven
angles (three Euler angles per factor plus the global phase), then refines
the best 50 grid points with Nelder-Mead. Independent of krakos.strength:
it builds its own Euler matrices and never uses the closed-form phase.

    python scripts/oracle_kdist_cnot.py
"""

import itertools
import math

import numpy as np
from scipy.optimize import minimize

GRID = 12
REFINE = 50


def euler(a, b, c):
    rz = lambda t: np.array([[np.exp(-0.5j * t), 0], [0, np.exp(0.5j * t)]])
    ry = np.array([[math.cos(b / 2), -math.sin(b / 2)], [math.sin(b / 2), math.cos(b / 2)]])
    return rz(a) @ ry @ rz(c)


def distance(u, x):
    v = np.exp(1j * x[6]) * np.kron(euler(*x[0:3]), euler(*x[3:6]))
    return float(np.linalg.norm(u - v))


def grid_oracle(u):
    angles = np.arange(GRID) * (2 * math.pi / GRID)
    singles = [euler(a, b, c) for a, b, c in itertools.product(angles, repeat=3)]
    singles = np.array(singles)  # (G^3, 2, 2)
    # overlap tr((A (x) B)^dag U) = sum_{ijkl} conj(A_ij B_kl) U_{ik, jl}
    u4 = u.reshape(2, 2, 2, 2)
    partial = np.einsum("aij,ikjl->akl", singles.conj(), u4)  # contract A
    overlaps = np.einsum("akl,bkl->ab", partial, singles.conj())  # (A index, B index)
    phases = np.exp(-1j * angles)
    # ||U - e^{i phi} V||^2 = 2d - 2 Re(e^{-i phi} tr(V^dag U))
    d2 = 8.0 - 2.0 * np.real(overlaps[..., None] * phases)
    flat = np.argsort(d2, axis=None)[:REFINE]
    best = math.inf
    n3 = len(singles)
    combos = list(itertools.product(angles, repeat=3))
    for idx in flat:
        ia, ib, ip = np.unravel_index(idx, d2.shape)
        x0 = np.array([*combos[ia], *combos[ib], angles[ip]])
        res = minimize(lambda x: distance(u, x), x0, method="Nelder-Mead",
                       options=dict(xatol=1e-10, fatol=1e-12, maxiter=20000))
        best = min(best, res.fun)
    assert n3 == GRID**3
    return math.sqrt(max(float(d2.min()), 0.0)), best


if __name__ == "__main__":
    cnot = np.eye(4)[[0, 1, 3, 2]].astype(complex)
    swap = np.eye(4)[[0, 2, 1, 3]].astype(complex)
    for name, u in (("CNOT", cnot), ("SWAP", swap)):
        coarse, refined = grid_oracle(u)
        print(f"{name}: grid min {coarse:.6f}, refined {refined:.10f}")
