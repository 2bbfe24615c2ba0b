"""Dense complex linear algebra for small quantum systems.

Density operators, Kraus channels, POVMs, entropies (base 2 throughout) and
trace distance.  All functions are pure; values are immutable after
construction and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ContractError, DimensionError


@dataclass(frozen=True)
class Tolerances:
    """Numeric tolerances, overridable per call."""

    herm: float = 1e-9     # Hermiticity defect
    tp: float = 1e-9       # trace preservation / POVM completeness
    psd: float = 1e-9      # negative-eigenvalue slack
    eig: float = 1e-8      # eigensolver residual / orthonormality
    tr: float = 1e-9       # trace / normalization defect
    dim_cap: int = 1 << 20  # largest materialized operator dimension


DEFAULT_TOL = Tolerances()


def _as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionError(f"expected a matrix, got ndim={a.ndim}")
    if not np.all(np.isfinite(a.view(np.float64))):
        raise ContractError("matrix entries must be finite")
    return a


def _as_vector(v) -> np.ndarray:
    a = np.asarray(v, dtype=np.complex128).reshape(-1)
    if not np.all(np.isfinite(a.view(np.float64))):
        raise ContractError("vector entries must be finite")
    return a


def herm_defect(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def tensor(a, b, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Kronecker product with index convention (i_a, i_b) -> i_a*dim_b + i_b."""
    a, b = _as_matrix(a), _as_matrix(b)
    if a.shape[0] * b.shape[0] > tol.dim_cap or a.shape[1] * b.shape[1] > tol.dim_cap:
        raise DimensionError(
            f"tensor product dimension {a.shape[0] * b.shape[0]} exceeds cap {tol.dim_cap}"
        )
    return np.kron(a, b)


def hermitian_eigen(
    m, tol: Tolerances = DEFAULT_TOL, check: bool = True
) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues, eigenvectors) with eigenvalues real and descending and
    eigenvectors as columns.  When ``check`` is set the residual
    ||M v - lambda v|| <= tol.eig * ||M|| and column orthonormality are verified.
    """
    m = _as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"matrix is {m.shape}, not square")
    if herm_defect(m) > tol.herm:
        raise ContractError(f"matrix is not Hermitian within {tol.herm}")
    w, v = np.linalg.eigh(m)
    w, v = w[::-1].copy(), v[:, ::-1].copy()
    if check:
        scale = max(1.0, float(np.linalg.norm(m, 2)))
        resid = np.linalg.norm(m @ v - v * w, axis=0)
        if np.any(resid > tol.eig * scale):
            raise ContractError("eigensolver residual exceeds tolerance")
        gram = v.conj().T @ v
        if np.max(np.abs(gram - np.eye(m.shape[0]))) > tol.eig:
            raise ContractError("eigenvectors are not orthonormal within tolerance")
    return w, v


def entropy_of_spectrum(eigs: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> float:
    """-sum(l * log2 l) with 0 log 0 = 0; eigenvalues in [-psd, 0) clamp to 0."""
    lam = np.real(np.asarray(eigs, dtype=np.float64))
    if np.any(lam < -tol.psd):
        raise ContractError(f"eigenvalue {lam.min():.3e} below -{tol.psd}")
    lam = np.clip(lam, 0.0, None)
    pos = lam[lam > 0.0]
    return float(-np.sum(pos * np.log2(pos)))


class DensityOperator:
    """Hermitian, trace-1, positive-semidefinite matrix."""

    __slots__ = ("mat",)

    def __init__(self, mat, tol: Tolerances = DEFAULT_TOL):
        m = _as_matrix(mat)
        if m.shape[0] != m.shape[1]:
            raise DimensionError(f"density operator must be square, got {m.shape}")
        if herm_defect(m) > tol.herm:
            raise ContractError("density operator is not Hermitian within tolerance")
        tr = float(np.real(np.trace(m)))
        if abs(tr - 1.0) > max(tol.tr, 1e-12 * m.shape[0]):
            raise ContractError(f"trace {tr} differs from 1 beyond tolerance")
        wmin = float(np.linalg.eigvalsh(m)[0])
        if wmin < -tol.psd:
            raise ContractError(f"minimum eigenvalue {wmin:.3e} below -{tol.psd}")
        m = m.copy()
        m.flags.writeable = False
        self.mat = m

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def from_pure(cls, vec, tol: Tolerances = DEFAULT_TOL) -> "DensityOperator":
        v = _as_vector(vec)
        return cls(np.outer(v, v.conj()), tol=tol)

    def eigenvalues(self, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
        return np.linalg.eigvalsh(self.mat)[::-1].copy()

    def __repr__(self) -> str:
        return f"DensityOperator(dim={self.dim})"


class QuantumChannel:
    """Completely positive trace-preserving map given by Kraus blocks."""

    __slots__ = ("kraus", "dim_in", "dim_out")

    def __init__(self, kraus: Sequence, tol: Tolerances = DEFAULT_TOL):
        ops = tuple(_as_matrix(k) for k in kraus)
        if not ops:
            raise ContractError("channel needs at least one Kraus operator")
        dim_out, dim_in = ops[0].shape
        if any(k.shape != (dim_out, dim_in) for k in ops):
            raise DimensionError("Kraus operators have inconsistent shapes")
        if dim_in > tol.dim_cap or dim_out > tol.dim_cap:
            raise DimensionError(f"channel dimension exceeds cap {tol.dim_cap}")
        acc = np.zeros((dim_in, dim_in), dtype=np.complex128)
        for k in ops:
            acc += k.conj().T @ k
        if np.max(np.abs(acc - np.eye(dim_in))) > max(tol.tp, 1e-12 * len(ops) * dim_in):
            raise ContractError("Kraus operators do not sum to identity (not trace preserving)")
        self.kraus = ops
        self.dim_in = dim_in
        self.dim_out = dim_out

    @classmethod
    def identity(cls, dim: int) -> "QuantumChannel":
        return cls([np.eye(dim)])

    def __repr__(self) -> str:
        return f"QuantumChannel({self.dim_in}->{self.dim_out}, {len(self.kraus)} Kraus)"


class Povm:
    """Positive operator-valued measure: PSD effects summing to identity."""

    __slots__ = ("effects", "dim")

    def __init__(self, effects: Sequence, tol: Tolerances = DEFAULT_TOL):
        ops = tuple(_as_matrix(e) for e in effects)
        if not ops:
            raise ContractError("POVM needs at least one effect")
        dim = ops[0].shape[0]
        acc = np.zeros((dim, dim), dtype=np.complex128)
        for e in ops:
            if e.shape != (dim, dim):
                raise DimensionError("POVM effects have inconsistent shapes")
            if herm_defect(e) > tol.herm:
                raise ContractError("POVM effect is not Hermitian")
            if float(np.linalg.eigvalsh(e)[0]) < -tol.psd:
                raise ContractError("POVM effect is not positive semidefinite")
            acc += e
        if np.max(np.abs(acc - np.eye(dim))) > max(tol.tp, 1e-12 * len(ops) * dim):
            raise ContractError("POVM effects do not sum to identity")
        self.effects = ops
        self.dim = dim


def partial_trace(
    rho: DensityOperator,
    factor_dims: Sequence[int],
    keep: Sequence[int],
    tol: Tolerances = DEFAULT_TOL,
) -> DensityOperator:
    """Reduce to the factors in ``keep`` (0-indexed, order preserved)."""
    return DensityOperator(
        partial_trace_mat(rho.mat, factor_dims, keep), tol=tol
    )


def partial_trace_mat(mat, factor_dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Partial trace on a raw matrix; factor 0 is the most significant index."""
    m = _as_matrix(mat)
    dims = list(int(d) for d in factor_dims)
    total = int(np.prod(dims)) if dims else 1
    if m.shape != (total, total):
        raise DimensionError(f"matrix dim {m.shape[0]} != product of factors {total}")
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise DimensionError("keep index out of range")
    k = len(dims)
    t = m.reshape(dims + dims)
    row_idx = list(range(k))
    col_idx = [k + i if i in keep else i for i in range(k)]
    out_idx = keep + [k + i for i in keep]
    d_keep = int(np.prod([dims[i] for i in keep])) if keep else 1
    return np.einsum(t, row_idx + col_idx, out_idx).reshape(d_keep, d_keep)


def vn_entropy(rho: DensityOperator, tol: Tolerances = DEFAULT_TOL) -> float:
    """Von Neumann entropy -Tr rho log2 rho, in bits."""
    return entropy_of_spectrum(np.linalg.eigvalsh(rho.mat), tol=tol)


def shannon_entropy(p, tol: Tolerances = DEFAULT_TOL) -> float:
    """Shannon entropy of a probability vector, in bits."""
    q = np.asarray(p, dtype=np.float64).reshape(-1)
    if np.any(q < -tol.psd):
        raise ContractError("probabilities must be nonnegative")
    if abs(float(q.sum()) - 1.0) > max(tol.tr, 1e-6):
        raise ContractError(f"probabilities sum to {q.sum()}, not 1")
    return entropy_of_spectrum(q, tol=tol)


def holevo_chi(
    probs, states: Sequence[DensityOperator], tol: Tolerances = DEFAULT_TOL
) -> float:
    """Holevo quantity S(sum p rho) - sum p S(rho), in bits."""
    p = np.asarray(probs, dtype=np.float64).reshape(-1)
    if len(p) != len(states):
        raise DimensionError("probability and state counts differ")
    if np.any(p < -tol.psd) or abs(float(p.sum()) - 1.0) > max(tol.tr, 1e-6):
        raise ContractError("invalid probability vector")
    dim = states[0].dim
    if any(s.dim != dim for s in states):
        raise DimensionError("ensemble states have mixed dimensions")
    avg = np.zeros((dim, dim), dtype=np.complex128)
    for pi, s in zip(p, states):
        avg += pi * s.mat
    chi = entropy_of_spectrum(np.linalg.eigvalsh(avg), tol=tol) - float(
        sum(pi * vn_entropy(s, tol=tol) for pi, s in zip(p, states))
    )
    if chi < -tol.eig:
        raise ContractError(f"Holevo quantity {chi:.3e} below -{tol.eig}")
    return chi


def apply_channel(
    ch: QuantumChannel, rho: DensityOperator, tol: Tolerances = DEFAULT_TOL
) -> DensityOperator:
    """sum_k K rho K^dagger."""
    if ch.dim_in != rho.dim:
        raise DimensionError(f"channel input dim {ch.dim_in} != state dim {rho.dim}")
    out = np.zeros((ch.dim_out, ch.dim_out), dtype=np.complex128)
    for k in ch.kraus:
        out += k @ rho.mat @ k.conj().T
    return DensityOperator(out, tol=tol)


def fidelity_pure(phi, rho: DensityOperator, tol: Tolerances = DEFAULT_TOL) -> float:
    """<phi| rho |phi>, clamped to [0, 1]."""
    v = _as_vector(phi)
    if abs(float(np.linalg.norm(v)) - 1.0) > max(tol.tr, 1e-7):
        raise ContractError("reference vector is not normalized")
    if v.shape[0] != rho.dim:
        raise DimensionError(f"vector dim {v.shape[0]} != state dim {rho.dim}")
    val = float(np.real(v.conj() @ rho.mat @ v))
    return min(1.0, max(0.0, val))


def trace_distance(
    a: DensityOperator, b: DensityOperator, tol: Tolerances = DEFAULT_TOL
) -> float:
    """Trace norm ||a - b||_1 = sum |eigenvalues of a - b|."""
    if a.dim != b.dim:
        raise DimensionError("operands have different dimensions")
    return trace_norm(a.mat - b.mat)


def trace_norm(m) -> float:
    m = _as_matrix(m)
    if herm_defect(m) <= 1e-9:
        return float(np.sum(np.abs(np.linalg.eigvalsh(m))))
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))
