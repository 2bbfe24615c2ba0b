"""Bipartite pure-state ensembles: reduction, reducibility, built-in sources.

An ensemble is a probability distribution over pure states on A x B with joint
index a*d_B + b (A-major).  Zero-probability items are dropped at
construction; negative probabilities are rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ContractError, DimensionError, InputParseError
from .linalg import (
    DEFAULT_TOL,
    DensityOperator,
    Tolerances,
    partial_trace_mat,
)

PROB_SUM_TOL = 1e-6


@dataclass(frozen=True)
class BipartiteEnsemble:
    d_a: int
    d_b: int
    items: tuple[tuple[float, np.ndarray], ...]

    def __post_init__(self):
        if self.d_a < 1 or self.d_b < 1:
            raise ContractError("local dimensions must be positive")
        kept = []
        total = 0.0
        for p, vec in self.items:
            p = float(p)
            if p < 0:
                raise ContractError(f"negative probability {p}")
            total += p
            if p == 0.0:
                continue
            v = np.asarray(vec, dtype=np.complex128).reshape(-1)
            if v.shape[0] != self.d_a * self.d_b:
                raise DimensionError(
                    f"state vector length {v.shape[0]} != d_a*d_b = {self.d_a * self.d_b}"
                )
            if abs(float(np.linalg.norm(v)) - 1.0) > 1e-7:
                raise ContractError("state vector is not normalized")
            v = v.copy()
            v.flags.writeable = False
            kept.append((p, v))
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise ContractError(f"probabilities sum to {total}, not 1")
        if not kept:
            raise ContractError("ensemble has no states with positive probability")
        object.__setattr__(self, "items", tuple(kept))

    @property
    def size(self) -> int:
        return len(self.items)

    def probabilities(self) -> np.ndarray:
        return np.array([p for p, _ in self.items])

    def vectors(self) -> list[np.ndarray]:
        return [v for _, v in self.items]


@dataclass(frozen=True)
class ReducedEnsemble:
    dim: int
    items: tuple[tuple[float, DensityOperator], ...]

    def __post_init__(self):
        total = sum(p for p, _ in self.items)
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise ContractError(f"probabilities sum to {total}, not 1")
        if any(s.dim != self.dim for _, s in self.items):
            raise DimensionError("reduced states have inconsistent dimensions")


def reduced_ensemble(
    e: BipartiteEnsemble, side: str, tol: Tolerances = DEFAULT_TOL
) -> ReducedEnsemble:
    """Trace out the other party from every state, preserving order."""
    if side not in ("A", "B"):
        raise ContractError(f"side must be 'A' or 'B', got {side!r}")
    keep = [0] if side == "A" else [1]
    dims = [e.d_a, e.d_b]
    items = []
    for p, v in e.items:
        red = partial_trace_mat(np.outer(v, v.conj()), dims, keep)
        items.append((p, DensityOperator(red, tol=tol)))
    return ReducedEnsemble(dim=dims[keep[0]], items=tuple(items))


def average_state(e: BipartiteEnsemble, tol: Tolerances = DEFAULT_TOL) -> DensityOperator:
    """sum_i p_i |phi_i><phi_i|."""
    dim = e.d_a * e.d_b
    acc = np.zeros((dim, dim), dtype=np.complex128)
    for p, v in e.items:
        acc += p * np.outer(v, v.conj())
    return DensityOperator(acc, tol=tol)


def is_reducible(
    vectors: Sequence[np.ndarray], tol: float = 1e-9
) -> tuple[bool, list[list[int]]]:
    """Whether the vectors split into two or more mutually orthogonal groups.

    Builds the graph with an edge (i, j) whenever |<phi_i|phi_j>| > tol and
    returns (disconnected?, connected components as the partition witness).
    """
    vecs = [np.asarray(v, dtype=np.complex128).reshape(-1) for v in vectors]
    if not vecs:
        raise ContractError("need at least one vector")
    dim = vecs[0].shape[0]
    if any(v.shape[0] != dim for v in vecs):
        raise DimensionError("vectors have mixed dimensions")
    n = len(vecs)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(np.vdot(vecs[i], vecs[j])) > tol:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    components = sorted(groups.values())
    return len(components) > 1, components


def is_product_ensemble(e: BipartiteEnsemble, tol: float = 1e-9) -> bool:
    """True when every state has Schmidt rank 1 (second marginal eigenvalue <= tol)."""
    for _, v in e.items:
        red = partial_trace_mat(np.outer(v, v.conj()), [e.d_a, e.d_b], [0])
        w = np.linalg.eigvalsh(red)
        second = float(w[-2]) if len(w) >= 2 else 0.0
        if second > tol:
            return False
    return True


# ---------------------------------------------------------------------------
# Built-in sources
# ---------------------------------------------------------------------------

_SQ2 = 1.0 / np.sqrt(2.0)

# Label (y1, y2): amplitude bit y1, phase bit y2; vector (|0,y1> + (-1)^y2 |1,1-y1>)/sqrt(2)
BELL_VECTORS = (
    np.array([_SQ2, 0, 0, _SQ2], dtype=complex),    # (0,0)  phi+
    np.array([_SQ2, 0, 0, -_SQ2], dtype=complex),   # (0,1)  phi-
    np.array([0, _SQ2, _SQ2, 0], dtype=complex),    # (1,0)  psi+
    np.array([0, _SQ2, -_SQ2, 0], dtype=complex),   # (1,1)  psi-
)


def bell_ensemble(p: Sequence[float]) -> BipartiteEnsemble:
    p = [float(x) for x in p]
    if len(p) != 4:
        raise ContractError("bell ensemble needs four probabilities")
    return BipartiteEnsemble(2, 2, tuple(zip(p, BELL_VECTORS)))


def hidden_orthogonality_vectors(alpha: float, beta: float):
    """The two local families: A-side qubit vectors, B-side qutrit vectors."""
    if not (0.0 <= alpha < 1.0 and 0.0 <= beta < 1.0):
        raise ContractError("alpha and beta must lie in [0, 1)")
    a = [
        np.array([1, 0], dtype=complex),
        np.array([np.sqrt(alpha), np.sqrt(1 - alpha)], dtype=complex),
        np.array([0, 1], dtype=complex),
    ]
    b = [
        np.array([np.sqrt(1 - beta), np.sqrt(beta), 0], dtype=complex),
        np.array([0, 1, 0], dtype=complex),
        np.array([np.sqrt(beta), 0, np.sqrt(1 - beta)], dtype=complex),
    ]
    return a, b


def hidden_orthogonality_ensemble(alpha: float, beta: float) -> BipartiteEnsemble:
    a, b = hidden_orthogonality_vectors(alpha, beta)
    items = tuple((1.0 / 3.0, np.kron(ai, bi)) for ai, bi in zip(a, b))
    return BipartiteEnsemble(2, 3, items)


def _four_qubit(bits: str) -> int:
    return int(bits, 2)


def erasure_code_vectors() -> tuple[np.ndarray, ...]:
    """Orthonormal basis of the one-erasure code on four qubits."""
    pairs = [("0000", "1111"), ("0011", "1100"), ("0101", "1010"), ("1001", "0110")]
    out = []
    for x, y in pairs:
        v = np.zeros(16, dtype=complex)
        v[_four_qubit(x)] = _SQ2
        v[_four_qubit(y)] = _SQ2
        out.append(v)
    return tuple(out)


def erasure_code_ensemble(weights: Sequence[float] | None = None) -> BipartiteEnsemble:
    """Codeword ensemble; Alice holds the first two qubits, Bob the last two."""
    w = [0.25] * 4 if weights is None else [float(x) for x in weights]
    if len(w) != 4:
        raise ContractError("erasure ensemble needs four weights")
    return BipartiteEnsemble(4, 4, tuple(zip(w, erasure_code_vectors())))


def walgate_pair_ensemble(
    p0: float, p1: float, alpha0: float, beta0: float, alpha1: float, beta1: float
) -> BipartiteEnsemble:
    """Two orthogonal two-qubit states in local normal form."""
    for a, b in ((alpha0, beta0), (alpha1, beta1)):
        if abs(a * a + b * b - 1.0) > 1e-9:
            raise ContractError("amplitudes must satisfy alpha^2 + beta^2 = 1")
    if abs(p0 + p1 - 1.0) > PROB_SUM_TOL:
        raise ContractError("probabilities must sum to 1")
    v0 = np.array([alpha0, 0, 0, beta0], dtype=complex)
    v1 = np.array([0, alpha1, beta1, 0], dtype=complex)
    return BipartiteEnsemble(2, 2, ((float(p0), v0), (float(p1), v1)))


BUILTIN_NAMES = ("bell", "hidden_orthogonality", "erasure_code", "walgate_pair")


def builtin(name: str, params: Sequence[float] = ()) -> BipartiteEnsemble:
    params = [float(x) for x in params]
    if name == "bell":
        return bell_ensemble(params if params else [0.25] * 4)
    if name == "hidden_orthogonality":
        if len(params) != 2:
            raise ContractError("hidden_orthogonality takes (alpha, beta)")
        return hidden_orthogonality_ensemble(*params)
    if name == "erasure_code":
        return erasure_code_ensemble(params or None)
    if name == "walgate_pair":
        if len(params) != 6:
            raise ContractError("walgate_pair takes (p0, p1, alpha0, beta0, alpha1, beta1)")
        return walgate_pair_ensemble(*params)
    raise ContractError(f"unknown builtin {name!r}; choose from {BUILTIN_NAMES}")


def sample_product_sequence(
    e: BipartiteEnsemble, n: int, rng: np.random.Generator
) -> np.ndarray:
    """n i.i.d. item indices drawn from the ensemble distribution."""
    if n < 1:
        raise ContractError("sequence length must be >= 1")
    p = e.probabilities()
    return rng.choice(len(p), size=n, p=p / p.sum())


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------


def ensemble_from_json(text: str) -> BipartiteEnsemble:
    """Parse {"dA": int, "dB": int, "states": [{"p":…, "vector": [[re,im],…]}…]}."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InputParseError("top-level JSON value must be an object")
    try:
        d_a, d_b = int(doc["dA"]), int(doc["dB"])
        states = doc["states"]
    except KeyError as exc:
        raise InputParseError(f"missing field {exc}") from exc
    if not isinstance(states, list) or not states:
        raise InputParseError("'states' must be a non-empty array")
    items = []
    for idx, entry in enumerate(states):
        try:
            p = float(entry["p"])
            vec = [complex(re, im) for re, im in entry["vector"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputParseError(f"states[{idx}]: {exc}") from exc
        if len(vec) != d_a * d_b:
            raise InputParseError(
                f"states[{idx}]: vector length {len(vec)} != dA*dB = {d_a * d_b}"
            )
        items.append((p, np.array(vec)))
    total = sum(p for p, _ in items)
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise InputParseError(f"probabilities sum to {total}, not 1 within {PROB_SUM_TOL}")
    try:
        return BipartiteEnsemble(d_a, d_b, tuple(items))
    except (ContractError, DimensionError) as exc:
        raise InputParseError(str(exc)) from exc


def ensemble_to_json(e: BipartiteEnsemble) -> str:
    doc = {
        "dA": e.d_a,
        "dB": e.d_b,
        "states": [
            {"p": p, "vector": [[float(z.real), float(z.imag)] for z in v]}
            for p, v in e.items
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def parse_probability(text: str) -> float:
    """Accept exact rationals ('1/3') or decimal literals."""
    text = text.strip()
    try:
        if "/" in text:
            return float(Fraction(text))
        return float(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputParseError(f"cannot parse probability {text!r}") from exc
