"""Independent desk-scale reference routes used to cross-check the fast paths.

Everything here recomputes a result from first principles with a different
algorithm than the production code: label tables from 4-qubit statevectors,
maximum-likelihood decoding by full enumeration in exact rational arithmetic,
and reducibility by exhausting all bipartitions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import ContractError
from .hashing import (
    BellLabel,
    LabelString,
    ObservationSystem,
    bcnot_labels,
    bilateral_h_label,
    label_to_state,
    observe,
)
from .qubits import HADAMARD, apply_cnot, apply_one, same_up_to_phase


def _two_pair_state(z: BellLabel, y: BellLabel) -> np.ndarray:
    # Qubit order (z_A, z_B, y_A, y_B); each Bell vector is (party A, party B).
    return np.kron(label_to_state(z), label_to_state(y))


def bcnot_statevector(z: BellLabel, y: BellLabel) -> tuple[BellLabel, BellLabel]:
    """Bilateral CNOT resolved on an actual 4-qubit state, then re-labelled.

    Both parties apply CNOT with their half of pair y as control and their
    half of pair z as target.
    """
    state = _two_pair_state(z, y)
    state = apply_cnot(state, control=2, target=0, n=4)  # Alice: y_A -> z_A
    state = apply_cnot(state, control=3, target=1, n=4)  # Bob:   y_B -> z_B
    for z2, y2 in itertools.product(_ALL_LABELS, _ALL_LABELS):
        if same_up_to_phase(state, _two_pair_state(z2, y2)):
            return z2, y2
    raise ContractError("post-gate state is not a product of Bell states")


def bilateral_h_statevector(y: BellLabel) -> BellLabel:
    state = label_to_state(y)
    state = apply_one(state, HADAMARD, 0, 2)
    state = apply_one(state, HADAMARD, 1, 2)
    for y2 in _ALL_LABELS:
        if same_up_to_phase(state, label_to_state(y2)):
            return y2
    raise ContractError("post-gate state is not a Bell state")


_ALL_LABELS = tuple(BellLabel(a, b) for a in (0, 1) for b in (0, 1))


@dataclass
class OracleReport:
    name: str
    cases: int
    mismatches: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.mismatches


def check_bcnot_table(
    table: Callable[[BellLabel, BellLabel], tuple[BellLabel, BellLabel]] = bcnot_labels,
) -> OracleReport:
    """All 16 label pairs against the statevector route."""
    report = OracleReport(name="bcnot_labels", cases=16)
    for z, y in itertools.product(_ALL_LABELS, _ALL_LABELS):
        got = table(z, y)
        want = bcnot_statevector(z, y)
        if tuple(got[0]) != tuple(want[0]) or tuple(got[1]) != tuple(want[1]):
            report.mismatches.append(f"bcnot{z, y}: table {got} vs statevector {want}")
    return report


def check_bilateral_h_table(
    table: Callable[[BellLabel], BellLabel] = bilateral_h_label,
) -> OracleReport:
    report = OracleReport(name="bilateral_h_label", cases=4)
    for y in _ALL_LABELS:
        got, want = table(y), bilateral_h_statevector(y)
        if tuple(got) != tuple(want):
            report.mismatches.append(f"bilateral_h{y}: table {got} vs statevector {want}")
    return report


def check_label_states_orthonormal() -> OracleReport:
    report = OracleReport(name="label_to_state gram", cases=16)
    vecs = [label_to_state(l) for l in _ALL_LABELS]
    gram = np.array([[np.vdot(u, v) for v in vecs] for u in vecs])
    if np.max(np.abs(gram - np.eye(4))) > 1e-12:
        report.mismatches.append("Gram matrix of the four label states is not identity")
    return report


def exhaustive_ml_decode(
    obs: int, sys: ObservationSystem, p: Sequence[float]
) -> tuple[list[int], int]:
    """All maximizers of the string probability among the 4^n consistent strings.

    Returns (sorted maximizer bit patterns, count of consistent strings).
    Probabilities are compared as exact rationals.
    """
    n = sys.n
    fp = [Fraction(float(v)) for v in p]
    best: Fraction | None = None
    winners: list[int] = []
    consistent = 0
    for bits in range(1 << (2 * n)):
        x = LabelString(n=n, bits=bits)
        if observe(x, sys) != obs:
            continue
        consistent += 1
        prob = Fraction(1)
        for i in range(n):
            prob *= fp[((bits >> (2 * i)) & 1) * 2 + ((bits >> (2 * i + 1)) & 1)]
        if best is None or prob > best:
            best, winners = prob, [bits]
        elif prob == best:
            winners.append(bits)
    return sorted(winners), consistent


def brute_force_reducible(vectors: Sequence[np.ndarray], tol: float = 1e-9) -> bool:
    """Reducibility by trying every bipartition into mutually orthogonal groups."""
    vecs = [np.asarray(v, dtype=np.complex128).reshape(-1) for v in vectors]
    n = len(vecs)
    if n <= 1:
        return False
    for bits in range(1, 1 << (n - 1)):
        left = [i for i in range(n) if (bits >> i) & 1]
        right = [i for i in range(n) if not (bits >> i) & 1]
        if all(abs(np.vdot(vecs[i], vecs[j])) <= tol for i in left for j in right):
            return True
    return False
