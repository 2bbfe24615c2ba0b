"""Small statevector utilities on qubit registers.

Qubit 0 is the most significant index: basis index = sum_t bit_t << (n-1-t).
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError

HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2.0)
PAULI = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


def apply_one(state: np.ndarray, gate: np.ndarray, qubit: int, n: int) -> np.ndarray:
    if state.shape != (1 << n,):
        raise DimensionError("state length does not match qubit count")
    t = state.reshape((2,) * n)
    t = np.tensordot(gate, t, axes=([1], [qubit]))
    return np.moveaxis(t, 0, qubit).reshape(-1)


def apply_two(state: np.ndarray, gate: np.ndarray, q1: int, q2: int, n: int) -> np.ndarray:
    """Apply a 4x4 gate whose index convention is (q1, q2) major."""
    if state.shape != (1 << n,):
        raise DimensionError("state length does not match qubit count")
    t = state.reshape((2,) * n)
    g = gate.reshape(2, 2, 2, 2)
    t = np.tensordot(g, t, axes=([2, 3], [q1, q2]))
    return np.moveaxis(t, [0, 1], [q1, q2]).reshape(-1)


CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)  # index (control, target)


def apply_cnot(state: np.ndarray, control: int, target: int, n: int) -> np.ndarray:
    return apply_two(state, CNOT, control, target, n)


def embed_unitary(build, n: int) -> np.ndarray:
    """Materialize an n-qubit unitary from a vector-transform callable."""
    dim = 1 << n
    cols = [build(np.eye(dim, dtype=np.complex128)[:, k]) for k in range(dim)]
    return np.stack(cols, axis=1)


def pauli_at(name: str, position: int, n: int) -> np.ndarray:
    """Single-qubit Pauli embedded at a 0-indexed position of an n-qubit register."""
    out = np.eye(1, dtype=np.complex128)
    for t in range(n):
        out = np.kron(out, PAULI[name] if t == position else PAULI["I"])
    return out


def same_up_to_phase(u: np.ndarray, v: np.ndarray, tol: float = 1e-10) -> bool:
    return abs(abs(np.vdot(u, v)) - 1.0) <= tol
