"""Exact simulation of encoding-decoding schemes on small blocks.

Dense schemes (`LocalScheme` + `scheme_fidelity`) materialize every channel,
so they are limited to a few copies; the structured hidden-orthogonality
evaluator keeps the two local registers factorized and scales to a dozen
copies while remaining exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CapacityError, ContractError, DimensionError
from .linalg import (
    DEFAULT_TOL,
    DensityOperator,
    Povm,
    QuantumChannel,
    Tolerances,
    fidelity_pure,
    hermitian_eigen,
    trace_norm,
    vn_entropy,
)
from .ensembles import (
    BipartiteEnsemble,
    bell_ensemble,
    hidden_orthogonality_vectors,
)
from .hashing import (
    COMPILED,
    BellLabel,
    LabelString,
    MaskSchedule,
    ObservationSystem,
    compile_protocol,
    decode,
    label_to_state,
    observe,
)
from .oracles import (
    OracleReport,
    check_bcnot_table,
    check_bilateral_h_table,
    check_label_states_orthonormal,
)
from .qubits import HADAMARD, apply_cnot, apply_one, embed_unitary, pauli_at

EXACT_SEQUENCE_CAP = 10**6
_CHANNEL_ENTRY_CAP = 1 << 24


# ---------------------------------------------------------------------------
# Dense schemes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalScheme:
    """Independent encoders plus a joint decoder, all dense channels.

    The joint Hilbert space is ordered A-block major: the decoder output index
    is a_joint * d_b^n + b_joint with each side's copies in order.
    """

    n: int
    d_a: int
    d_b: int
    enc_a: QuantumChannel
    enc_b: QuantumChannel
    dec: QuantumChannel

    def __post_init__(self):
        if self.enc_a.dim_in != self.d_a**self.n:
            raise DimensionError("enc_a input dimension does not match d_a^n")
        if self.enc_b.dim_in != self.d_b**self.n:
            raise DimensionError("enc_b input dimension does not match d_b^n")
        if self.dec.dim_in != self.enc_a.dim_out * self.enc_b.dim_out:
            raise DimensionError("decoder input does not match encoder outputs")
        if self.dec.dim_out != (self.d_a * self.d_b) ** self.n:
            raise DimensionError("decoder output does not match the source block")

    @property
    def rate_a(self) -> float:
        return float(np.log2(self.enc_a.dim_out)) / self.n

    @property
    def rate_b(self) -> float:
        return float(np.log2(self.enc_b.dim_out)) / self.n


@dataclass(frozen=True)
class FidelityReport:
    n: int
    average_fidelity: float
    worst_index: tuple[int, ...]
    worst_fidelity: float
    rate_a: float
    rate_b: float
    method: str
    sample_size: int | None = None
    stderr: float | None = None

    def __post_init__(self):
        if not (-1e-12 <= self.average_fidelity <= 1 + 1e-12):
            raise ContractError("average fidelity must lie in [0, 1]")

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "average_fidelity": self.average_fidelity,
            "worst_index": list(self.worst_index),
            "worst_fidelity": self.worst_fidelity,
            "rate_a": self.rate_a,
            "rate_b": self.rate_b,
            "method": self.method,
            "sample_size": self.sample_size,
            "stderr": self.stderr,
        }


def block_permutation(d_a: int, d_b: int, n: int) -> np.ndarray:
    """perm[block_index] = interleaved index of the same basis state."""
    size = (d_a * d_b) ** n
    idx = np.arange(size)
    a_joint = idx // d_b**n
    b_joint = idx % d_b**n
    inter = np.zeros(size, dtype=np.int64)
    for t in range(n):
        a_t = (a_joint // d_a ** (n - 1 - t)) % d_a
        b_t = (b_joint // d_b ** (n - 1 - t)) % d_b
        inter = inter * (d_a * d_b) + (a_t * d_b + b_t)
    return inter


def _guard_entries(count: int, rows: int, cols: int, what: str):
    if count * rows * cols > _CHANNEL_ENTRY_CAP:
        raise DimensionError(
            f"{what} would need {count} Kraus blocks of {rows}x{cols}; "
            "beyond the dense materialization cap"
        )


def compose_channels(after: QuantumChannel, before: QuantumChannel) -> QuantumChannel:
    if after.dim_in != before.dim_out:
        raise DimensionError("channel composition dimensions do not chain")
    _guard_entries(len(after.kraus) * len(before.kraus), after.dim_out, before.dim_in,
                   "channel composition")
    return QuantumChannel([a @ b for a in after.kraus for b in before.kraus])


def tensor_channels(a: QuantumChannel, b: QuantumChannel) -> QuantumChannel:
    _guard_entries(len(a.kraus) * len(b.kraus), a.dim_out * b.dim_out,
                   a.dim_in * b.dim_in, "channel tensor product")
    return QuantumChannel([np.kron(ka, kb) for ka in a.kraus for kb in b.kraus])


def tensor_power_channel(ch: QuantumChannel, n: int) -> QuantumChannel:
    out = ch
    for _ in range(n - 1):
        out = tensor_channels(out, ch)
    return out


def scheme_fidelity(
    e: BipartiteEnsemble,
    scheme: LocalScheme,
    method: str = "exact",
    sample_size: int = 2000,
    rng: np.random.Generator | None = None,
    cap: int = EXACT_SEQUENCE_CAP,
    tol: Tolerances = DEFAULT_TOL,
) -> FidelityReport:
    """Ensemble-average fidelity sum_i p_i <phi_i| D((E_A x E_B)(phi_i)) |phi_i>."""
    if e.d_a != scheme.d_a or e.d_b != scheme.d_b:
        raise DimensionError("ensemble and scheme dimensions differ")
    n, k = scheme.n, e.size
    perm = block_permutation(e.d_a, e.d_b, n)

    def sequence_fidelity(seq: tuple[int, ...]) -> float:
        phi_inter = np.ones(1, dtype=np.complex128)
        for t in seq:
            phi_inter = np.kron(phi_inter, e.items[t][1])
        phi = phi_inter[perm]
        dims_a, dims_b = e.d_a**n, e.d_b**n
        rho = np.outer(phi, phi.conj()).reshape(dims_a, dims_b, dims_a, dims_b)
        enc = np.zeros(
            (scheme.enc_a.dim_out * scheme.enc_b.dim_out,) * 2, dtype=np.complex128
        )
        for ka in scheme.enc_a.kraus:
            for kb in scheme.enc_b.kraus:
                block = np.einsum("ac,bd,cdef,eg,fh->abgh", ka, kb, rho,
                                  ka.conj().T, kb.conj().T, optimize=True)
                enc += block.reshape(enc.shape)
        out = np.zeros((scheme.dec.dim_out,) * 2, dtype=np.complex128)
        for kd in scheme.dec.kraus:
            out += kd @ enc @ kd.conj().T
        return fidelity_pure(phi, DensityOperator(out, tol=tol), tol=tol)

    probs = e.probabilities()
    if method == "exact":
        if k**n > cap:
            raise CapacityError(f"{k}^{n} sequences exceed the exact enumeration cap")
        total = 0.0
        worst = (2.0, ())
        for seq in itertools.product(range(k), repeat=n):
            w = float(np.prod([probs[t] for t in seq]))
            if w == 0.0:
                continue
            f = sequence_fidelity(seq)
            total += w * f
            if f < worst[0]:
                worst = (f, seq)
        return FidelityReport(
            n=n,
            average_fidelity=min(1.0, total),
            worst_index=tuple(worst[1]),
            worst_fidelity=worst[0],
            rate_a=scheme.rate_a,
            rate_b=scheme.rate_b,
            method="exact",
        )
    if method == "sampled":
        if rng is None:
            raise ContractError("sampled method needs an rng")
        vals = []
        worst = (2.0, ())
        for _ in range(sample_size):
            seq = tuple(int(x) for x in rng.choice(k, size=n, p=probs / probs.sum()))
            f = sequence_fidelity(seq)
            vals.append(f)
            if f < worst[0]:
                worst = (f, seq)
        vals = np.asarray(vals)
        return FidelityReport(
            n=n,
            average_fidelity=float(min(1.0, vals.mean())),
            worst_index=tuple(worst[1]),
            worst_fidelity=worst[0],
            rate_a=scheme.rate_a,
            rate_b=scheme.rate_b,
            method="sampled",
            sample_size=sample_size,
            stderr=float(vals.std(ddof=1) / np.sqrt(sample_size)),
        )
    raise ContractError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# Typical-subspace compression
# ---------------------------------------------------------------------------


def _fold_surprisals(s: np.ndarray, n: int) -> np.ndarray:
    total = np.zeros(1)
    for _ in range(n):
        total = (total[:, None] + s[None, :]).reshape(-1)
    return total


@dataclass(frozen=True)
class TypicalCompressor:
    """Projection onto the entropy-typical subspace of rho^(x n).

    Typical eigenvector sequences are those with per-copy surprisal within
    delta of the entropy; they are relabeled into ceil(log2 count) qubits.
    The atypical branch collapses onto the first typical basis state so the
    map stays trace preserving.
    """

    dim: int
    n: int
    delta: float
    eigenvalues: np.ndarray     # descending, per copy
    basis: np.ndarray           # columns are eigenvectors
    typical: np.ndarray         # boolean mask over dim^n eigenindex sequences
    q: int                      # compressed qubit count

    @classmethod
    def from_state(
        cls,
        rho: DensityOperator,
        n: int,
        delta: float,
        full_rate: bool = False,
        tol: Tolerances = DEFAULT_TOL,
    ) -> "TypicalCompressor":
        if rho.dim**n > EXACT_SEQUENCE_CAP:
            raise CapacityError("block too large to enumerate eigenvector sequences")
        w, v = hermitian_eigen(rho.mat, tol=tol)
        w = np.clip(np.real(w), 0.0, None)
        entropy = vn_entropy(rho, tol=tol)
        surp = np.where(w > tol.psd, -np.log2(np.where(w > 0, w, 1.0)), np.inf)
        total = _fold_surprisals(surp, n)
        if full_rate:
            typical = np.isfinite(total)  # whole support, no entropy window
        else:
            typical = np.abs(total / n - entropy) <= delta + 1e-12
        count = int(typical.sum())
        if count == 0:
            raise ContractError(
                "typical set is empty at this (n, delta); increase either"
            )
        q = max(0, int(np.ceil(np.log2(count))))
        return cls(
            dim=rho.dim, n=n, delta=delta, eigenvalues=w, basis=v,
            typical=typical, q=q,
        )

    @property
    def typical_count(self) -> int:
        return int(self.typical.sum())

    @property
    def rate(self) -> float:
        return self.q / self.n

    def to_eigenbasis(self, vec: np.ndarray) -> np.ndarray:
        t = vec.reshape((self.dim,) * self.n)
        for axis in range(self.n):
            t = np.moveaxis(
                np.tensordot(self.basis.conj().T, t, axes=([1], [axis])), 0, axis
            )
        return t.reshape(-1)

    def from_eigenbasis(self, vec: np.ndarray) -> np.ndarray:
        t = vec.reshape((self.dim,) * self.n)
        for axis in range(self.n):
            t = np.moveaxis(np.tensordot(self.basis, t, axes=([1], [axis])), 0, axis)
        return t.reshape(-1)

    def encode_pure(self, vec: np.ndarray) -> list[np.ndarray]:
        """Sub-normalized compressed branch vectors for a pure input."""
        hat = self.to_eigenbasis(vec)
        kept = hat[self.typical]
        mu = max(0.0, 1.0 - float(np.vdot(kept, kept).real))
        comp = np.zeros(1 << self.q, dtype=np.complex128)
        comp[: kept.shape[0]] = kept
        branches = [comp]
        if mu > 0.0:
            fix = np.zeros(1 << self.q, dtype=np.complex128)
            fix[0] = np.sqrt(mu)
            branches.append(fix)
        return branches

    def decode_pure(self, comp: np.ndarray) -> np.ndarray:
        hat = np.zeros(self.dim**self.n, dtype=np.complex128)
        hat[np.flatnonzero(self.typical)] = comp[: self.typical_count]
        return self.from_eigenbasis(hat)

    def to_channels(self, tol: Tolerances = DEFAULT_TOL) -> tuple[QuantumChannel, QuantumChannel]:
        """Dense (encoder, decoder) pair; only viable for small blocks."""
        big = self.dim**self.n
        comp_dim = 1 << self.q
        typ_idx = np.flatnonzero(self.typical)
        atyp_idx = np.flatnonzero(~self.typical)
        _guard_entries(1 + len(atyp_idx), comp_dim, big, "typical-subspace encoder")
        w_dag = np.eye(1, dtype=np.complex128)
        for _ in range(self.n):
            w_dag = np.kron(w_dag, self.basis.conj().T)
        k0 = np.zeros((comp_dim, big), dtype=np.complex128)
        k0[np.arange(len(typ_idx)), :] = w_dag[typ_idx, :]
        enc_kraus = [k0]
        fix_comp = np.zeros(comp_dim, dtype=np.complex128)
        fix_comp[0] = 1.0
        for u in atyp_idx:
            enc_kraus.append(np.outer(fix_comp, w_dag[u, :]))
        enc = QuantumChannel(enc_kraus, tol=tol)

        w_mat = w_dag.conj().T
        d0 = np.zeros((big, comp_dim), dtype=np.complex128)
        d0[:, np.arange(len(typ_idx))] = w_mat[:, typ_idx]
        dec_kraus = [d0]
        fix_orig = w_mat[:, typ_idx[0]]
        for slot in range(len(typ_idx), comp_dim):
            unit = np.zeros(comp_dim, dtype=np.complex128)
            unit[slot] = 1.0
            dec_kraus.append(np.outer(fix_orig, unit))
        dec = QuantumChannel(dec_kraus, tol=tol)
        return enc, dec


def schumacher_encoder(
    rho: DensityOperator,
    n: int,
    delta: float,
    tol: Tolerances = DEFAULT_TOL,
) -> tuple[TypicalCompressor, float]:
    """Typical-subspace compressor for rho^(x n) and its rate in qubits/copy."""
    comp = TypicalCompressor.from_state(rho, n, delta, tol=tol)
    return comp, comp.rate


def schumacher_fidelity(
    rho: DensityOperator, n: int, delta: float, tol: Tolerances = DEFAULT_TOL
) -> float:
    """Encode-decode fidelity averaged over the eigenvector-sequence ensemble.

    Evaluated by running every eigenbasis product state through the
    compressor's branch maps, not by summing the typical spectrum.
    """
    comp = TypicalCompressor.from_state(rho, n, delta, tol=tol)
    lam_seq = np.exp2(-_fold_surprisals(
        np.where(comp.eigenvalues > 0, -np.log2(np.where(comp.eigenvalues > 0,
                                                         comp.eigenvalues, 1.0)),
                 np.inf), n))
    big = comp.dim**n
    total = 0.0
    for seq_idx in range(big):
        w = float(lam_seq[seq_idx])
        if w == 0.0:
            continue
        hat = np.zeros(big, dtype=np.complex128)
        hat[seq_idx] = 1.0
        vec = comp.from_eigenbasis(hat)
        fid = 0.0
        for branch in comp.encode_pure(vec):
            back = comp.decode_pure(branch)
            fid += abs(np.vdot(vec, back)) ** 2
        total += w * fid
    return total


# ---------------------------------------------------------------------------
# Hidden-orthogonality protocol
# ---------------------------------------------------------------------------

_RELABEL_TO_QUBIT = (
    np.array([[1, 0, 0], [0, 1, 0]], dtype=np.complex128),   # keep the {0,1} plane
    np.array([[0, 0, 1], [0, 0, 0]], dtype=np.complex128),   # send |2> to |0>
)
_RELABEL_IN_QUTRIT = (
    np.diag([1.0, 1.0, 0.0]).astype(np.complex128),
    np.outer([1.0, 0.0, 0.0], [0.0, 0.0, 1.0]).astype(np.complex128),
)
_EMBED_QUBIT = np.array([[1, 0], [0, 1], [0, 0]], dtype=np.complex128)


def _ho_states(alpha: float, beta: float):
    if not (0.0 < alpha < 1.0 and 0.0 < beta < 1.0):
        raise ContractError("alpha and beta must lie strictly inside (0, 1)")
    return hidden_orthogonality_vectors(alpha, beta)


def _relabeled_pure(b: np.ndarray, kraus=_RELABEL_IN_QUTRIT) -> np.ndarray:
    """Output of the measure-and-relabel step on one source state.

    Both Kraus branches land on parallel vectors for every source state, so
    the output is pure; anything else would need full branch bookkeeping.
    """
    branches = [k @ b for k in kraus]
    branches = [v for v in branches if np.linalg.norm(v) > 1e-14]
    if len(branches) == 2:
        overlap = abs(np.vdot(branches[0], branches[1]))
        if overlap < np.linalg.norm(branches[0]) * np.linalg.norm(branches[1]) - 1e-12:
            raise ContractError("relabel branches are not parallel for this input")
        norm = np.sqrt(sum(float(np.vdot(v, v).real) for v in branches))
        return branches[0] / np.linalg.norm(branches[0]) * norm
    return branches[0]


def hidden_orthogonality_scheme(
    alpha: float,
    beta: float,
    n: int,
    delta: float,
    full_rate: bool = False,
    tol: Tolerances = DEFAULT_TOL,
) -> LocalScheme:
    """Dense scheme: local typical-subspace encoders, Bob's relabel step, and
    the joint projective correction.  Viable for a few copies only."""
    a_states, b_states = _ho_states(alpha, beta)
    rho_a = DensityOperator(sum(np.outer(a, a.conj()) for a in a_states) / 3.0, tol=tol)
    comp_a = TypicalCompressor.from_state(rho_a, n, delta, full_rate=full_rate, tol=tol)
    enc_a, dec_a = comp_a.to_channels(tol=tol)

    relabel = QuantumChannel(_RELABEL_TO_QUBIT, tol=tol)
    relabel_n = tensor_power_channel(relabel, n)
    b_prime = [_relabeled_pure(b, kraus=_RELABEL_TO_QUBIT) for b in b_states]
    rho_b = DensityOperator(sum(np.outer(v, v.conj()) for v in b_prime) / 3.0, tol=tol)
    comp_b = TypicalCompressor.from_state(rho_b, n, delta, full_rate=full_rate, tol=tol)
    enc_b_core, dec_b_core = comp_b.to_channels(tol=tol)
    enc_b = compose_channels(enc_b_core, relabel_n)

    embed_n = np.eye(1, dtype=np.complex128)
    for _ in range(n):
        embed_n = np.kron(embed_n, _EMBED_QUBIT)
    dec_b = compose_channels(QuantumChannel([embed_n], tol=tol), dec_b_core)

    proj_10 = np.zeros((6, 6), dtype=np.complex128)
    proj_10[3, 3] = 1.0  # |1>_A |0>_B at joint index 1*3 + 0
    replacement = np.kron(a_states[2], b_states[2])
    q_op = np.eye(6, dtype=np.complex128) - proj_10
    r_op = np.zeros((6, 6), dtype=np.complex128)
    r_op[:, 3] = replacement
    corr_inter = tensor_power_channel(QuantumChannel([q_op, r_op], tol=tol), n)
    perm = block_permutation(2, 3, n)
    corr_block = QuantumChannel([k[np.ix_(perm, perm)] for k in corr_inter.kraus], tol=tol)

    dec = compose_channels(corr_block, tensor_channels(dec_a, dec_b))
    return LocalScheme(n=n, d_a=2, d_b=3, enc_a=enc_a, enc_b=enc_b, dec=dec)


def _contract_product_dual(duals: list[np.ndarray], tensor_vec: np.ndarray, dim: int, n: int):
    """<d_1 x ... x d_n | v> for a dense v on (C^dim)^(x n)."""
    t = tensor_vec.reshape((dim,) * n)
    for d in duals:
        t = np.tensordot(d.conj(), t, axes=([0], [0]))
    return complex(t)


def hidden_orthogonality_fidelity(
    alpha: float,
    beta: float,
    n: int,
    delta: float,
    full_rate: bool = False,
    tol: Tolerances = DEFAULT_TOL,
) -> FidelityReport:
    """Exact block fidelity of the hidden-orthogonality protocol.

    Works per source sequence with the two local registers kept separate; the
    joint correction step is expanded over its per-copy branch duals, each of
    which factorizes across the A/B cut.  Exact up to floating point, and
    cross-checked against the dense scheme at one and two copies in the tests.
    """
    if 3**n > EXACT_SEQUENCE_CAP:
        raise CapacityError("sequence enumeration exceeds the exact cap")
    a_states, b_states = _ho_states(alpha, beta)
    rho_a = DensityOperator(sum(np.outer(a, a.conj()) for a in a_states) / 3.0, tol=tol)
    comp_a = TypicalCompressor.from_state(rho_a, n, delta, full_rate=full_rate, tol=tol)
    b_prime = [_relabeled_pure(b) for b in b_states]
    rho_bp = DensityOperator(sum(np.outer(v, v.conj()) for v in b_prime) / 3.0, tol=tol)
    comp_b = TypicalCompressor.from_state(rho_bp, n, delta, full_rate=full_rate, tol=tol)

    fix_a = int(np.flatnonzero(comp_a.typical)[0])
    fix_b = int(np.flatnonzero(comp_b.typical)[0])
    fix_a_digits = [(fix_a // 2 ** (n - 1 - t)) % 2 for t in range(n)]
    fix_b_digits = [(fix_b // 3 ** (n - 1 - t)) % 3 for t in range(n)]

    # Per-copy correction duals:  Q branch on t reads K^dag |phi_t|, which is
    # phi_t itself off the replaced axis and sqrt(1-beta) |1>|2> on it; the
    # replace branch contributes |1>|0> there and nothing elsewhere.
    q_dual_b = {
        0: b_states[0],
        1: b_states[1],
        2: np.sqrt(1 - beta) * np.array([0, 0, 1], dtype=np.complex128),
    }
    r_dual_b = np.array([1, 0, 0], dtype=np.complex128)

    total = 0.0
    worst = (2.0, ())
    weight = 3.0**-n
    for seq in itertools.product(range(3), repeat=n):
        a_hat = np.ones(1, dtype=np.complex128)
        for i in seq:
            a_hat = np.kron(a_hat, comp_a.basis.conj().T @ a_states[i])
        mass_a = float(np.sum(np.abs(a_hat[comp_a.typical]) ** 2))
        mu_a = max(0.0, 1.0 - mass_a)
        x_a = comp_a.from_eigenbasis(np.where(comp_a.typical, a_hat, 0.0))

        b_hat = np.ones(1, dtype=np.complex128)
        for i in seq:
            b_hat = np.kron(b_hat, comp_b.basis.conj().T @ b_prime[i])
        mass_b = float(np.sum(np.abs(b_hat[comp_b.typical]) ** 2))
        mu_b = max(0.0, 1.0 - mass_b)
        x_b = comp_b.from_eigenbasis(np.where(comp_b.typical, b_hat, 0.0))

        a_duals = [a_states[i] for i in seq]
        amp_a_main = _contract_product_dual(a_duals, x_a, 2, n)
        amp_a_fix = np.sqrt(mu_a) * np.prod(
            [np.vdot(a_states[i], comp_a.basis[:, d]) for i, d in zip(seq, fix_a_digits)]
        )
        a_weight = abs(amp_a_main) ** 2 + abs(amp_a_fix) ** 2

        replaced = [t for t, i in enumerate(seq) if i == 2]
        b_weight = 0.0
        for picks in itertools.product((0, 1), repeat=len(replaced)):
            duals = []
            it = iter(picks)
            for t, i in enumerate(seq):
                if i == 2 and next(it):
                    duals.append(q_dual_b[2])
                elif i == 2:
                    duals.append(r_dual_b)
                else:
                    duals.append(q_dual_b[i])
            amp_main = _contract_product_dual(duals, x_b, 3, n)
            amp_fix = np.sqrt(mu_b) * np.prod(
                [np.vdot(d, comp_b.basis[:, f]) for d, f in zip(duals, fix_b_digits)]
            )
            b_weight += abs(amp_main) ** 2 + abs(amp_fix) ** 2

        f = a_weight * b_weight
        total += weight * f
        if f < worst[0]:
            worst = (f, seq)

    return FidelityReport(
        n=n,
        average_fidelity=float(min(1.0, total)),
        worst_index=tuple(worst[1]),
        worst_fidelity=worst[0],
        rate_a=comp_a.rate,
        rate_b=comp_b.rate,
        method="exact-structured",
    )


def hidden_orthogonality_asymptotic_rates(
    alpha: float, beta: float, tol: Tolerances = DEFAULT_TOL
) -> dict:
    """Entropies the two encoders compress to in the large-block limit."""
    a_states, b_states = _ho_states(alpha, beta)
    rho_a = DensityOperator(sum(np.outer(a, a.conj()) for a in a_states) / 3.0, tol=tol)
    b_prime = [_relabeled_pure(b) for b in b_states]
    rho_bp = DensityOperator(sum(np.outer(v, v.conj()) for v in b_prime) / 3.0, tol=tol)
    ra = vn_entropy(rho_a, tol=tol)
    rb = vn_entropy(rho_bp, tol=tol)
    return {"rate_a": ra, "rate_b": rb, "rate_sum": ra + rb}


# ---------------------------------------------------------------------------
# Erasure code feasibility
# ---------------------------------------------------------------------------


def erasure_correctable(
    code_basis: Sequence[np.ndarray],
    position: int,
    residual_tol: float = 1e-8,
) -> tuple[bool, dict[str, float]]:
    """Known-position erasure correctability of a code on qubits.

    Checks P A P = (Tr(P A P)/Tr P) P in trace norm for every single-qubit
    operator A in {I, X, Y, Z} at the given 1-indexed position.
    """
    vecs = [np.asarray(v, dtype=np.complex128).reshape(-1) for v in code_basis]
    dim = vecs[0].shape[0]
    n_qubits = int(np.log2(dim))
    if 1 << n_qubits != dim:
        raise ContractError("code vectors must live on qubits")
    if not (1 <= position <= n_qubits):
        raise ContractError(f"position must be in 1..{n_qubits}")
    gram = np.array([[np.vdot(u, v) for v in vecs] for u in vecs])
    if np.max(np.abs(gram - np.eye(len(vecs)))) > 1e-9:
        raise ContractError("code basis is not orthonormal within 1e-9")
    proj = sum(np.outer(v, v.conj()) for v in vecs)
    rank = len(vecs)
    residuals = {}
    for name in ("I", "X", "Y", "Z"):
        op = pauli_at(name, position - 1, n_qubits)
        mid = proj @ op @ proj
        coeff = np.trace(mid) / rank
        residuals[name] = trace_norm(mid - coeff * proj)
    return all(r <= residual_tol for r in residuals.values()), residuals


# ---------------------------------------------------------------------------
# Gentle measurement
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GentleMeasurementReport:
    lambda_claim: float
    bound: float
    max_identification_error: float
    disturbances: tuple[float, ...]

    @property
    def holds(self) -> bool:
        return all(d <= self.bound + 1e-8 for d in self.disturbances)


def gentle_measurement_check(
    states: Sequence[DensityOperator],
    povm: Povm,
    assignment: Sequence[int],
    lambda_claim: float,
    tol: Tolerances = DEFAULT_TOL,
) -> GentleMeasurementReport:
    """Verify that a nearly-noiseless observation barely disturbs the states.

    Requires 1 - Tr(rho_a E_{phi(a)}) <= lambda for every a, then reports each
    trace-norm disturbance against sqrt(8 lambda) + lambda.
    """
    if len(assignment) != len(states):
        raise ContractError("assignment and state counts differ")
    roots = []
    for eff in povm.effects:
        w, v = np.linalg.eigh(eff)
        roots.append((v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T)
    max_err = 0.0
    for a, (rho, b) in enumerate(zip(states, assignment)):
        err = 1.0 - float(np.real(np.trace(rho.mat @ povm.effects[b])))
        if err > lambda_claim + 1e-10:
            raise ContractError(
                f"state {a}: identification error {err:.3e} exceeds the claimed lambda"
            )
        max_err = max(max_err, err)
    disturbances = []
    for rho in states:
        after = sum(r @ rho.mat @ r for r in roots)
        disturbances.append(trace_norm(rho.mat - after))
    return GentleMeasurementReport(
        lambda_claim=lambda_claim,
        bound=float(np.sqrt(8 * lambda_claim) + lambda_claim),
        max_identification_error=max_err,
        disturbances=tuple(disturbances),
    )


# ---------------------------------------------------------------------------
# Qubit-level view of the hashing protocol
# ---------------------------------------------------------------------------


def _schedule_gates(schedule: MaskSchedule):
    """(kind, channel pair, waste pair) triples in execution order."""
    gates = []
    n, m = schedule.n, schedule.m
    for k in range(2 * m):
        pair_c = k // 2
        amplitude_round = k % 2 == 0
        remaining = schedule.masks[k]
        while remaining:
            low = remaining & -remaining
            w = low.bit_length() - 1
            remaining ^= low
            pair_w = m + w // 2
            same_type = (w % 2 == 0) if amplitude_round else (w % 2 == 1)
            if not same_type:
                gates.append(("h", pair_w, pair_w))
            if amplitude_round:
                gates.append(("bcnot", pair_c, pair_w))  # target pair, control pair
            else:
                gates.append(("bcnot", pair_w, pair_c))
            if not same_type:
                gates.append(("h", pair_w, pair_w))
    return gates


def _party_unitary(schedule: MaskSchedule) -> np.ndarray:
    """One party's circuit on its n pair-halves (identical for both parties)."""
    n = schedule.n

    def build(vec):
        state = vec
        for kind, target_pair, control_pair in _schedule_gates(schedule):
            if kind == "h":
                state = apply_one(state, HADAMARD, target_pair, n)
            else:
                state = apply_cnot(state, control=control_pair, target=target_pair, n=n)
        return state

    return embed_unitary(build, n)


def _bell_block_vector(labels: Sequence[BellLabel], n: int) -> np.ndarray:
    inter = np.ones(1, dtype=np.complex128)
    for l in labels:
        inter = np.kron(inter, label_to_state(l))
    return inter[block_permutation(2, 2, n)]


def bell_protocol_channel_view(
    p: Sequence[float],
    n: int,
    m: int,
    schedule: MaskSchedule,
    cap: int = 1 << 22,
    tol: Tolerances = DEFAULT_TOL,
) -> LocalScheme:
    """The hashing protocol as actual qubit channels, for cross-validation.

    Alice and Bob each run the compiled gate circuit on their halves and
    forward the channel-pair halves; the decoder measures in the Bell basis
    and re-prepares the maximum-likelihood string (smallest on a tie).
    """
    if n > 6:
        raise CapacityError("qubit-level view is capped at 6 pairs")
    if schedule.mode != COMPILED:
        raise ContractError("the qubit-level view realizes compiled schedules only")
    sys = compile_protocol(n, m, schedule)
    u = _party_unitary(schedule)
    dim_keep, dim_drop = 1 << m, 1 << (n - m)
    kraus_enc = [
        u.reshape(dim_keep, dim_drop, 1 << n)[:, w, :] for w in range(dim_drop)
    ]
    enc = QuantumChannel(kraus_enc, tol=tol)

    dec_kraus = []
    for outcome in range(1 << (2 * m)):
        measured = LabelString(n=m, bits=outcome)
        bra = _bell_block_vector(measured.labels(), m)
        res = decode(outcome, sys, p)
        prep = _bell_block_vector(res.best.labels(), n)
        dec_kraus.append(np.outer(prep, bra.conj()))
    dec = QuantumChannel(dec_kraus, tol=tol)
    return LocalScheme(n=n, d_a=2, d_b=2, enc_a=enc, enc_b=enc, dec=dec)


def hashing_success_probability(p: Sequence[float], sys: ObservationSystem) -> float:
    """Exact probability that the re-prepared string equals the source string.

    Uses the same tie rule as the qubit-level decoder: a tied maximum resolves
    to the smallest candidate.  (The Monte Carlo reports instead count ties as
    failures; this quantity pairs with the physical re-preparation.)
    """
    n = sys.n
    probs = np.asarray([float(x) for x in p], dtype=np.float64)
    total = 0.0
    for bits in range(1 << (2 * n)):
        x = LabelString(n=n, bits=bits)
        w = float(np.prod([probs[((bits >> (2 * i)) & 1) * 2 + ((bits >> (2 * i + 1)) & 1)]
                           for i in range(n)]))
        if w == 0.0:
            continue
        res = decode(observe(x, sys), sys, p)
        if res.best == x:
            total += w
    return total


def pure_branch_fidelity(e: BipartiteEnsemble, scheme: LocalScheme) -> float:
    """Ensemble fidelity via Kraus branch amplitudes on pure inputs.

    Same quantity as :func:`scheme_fidelity` (exact mode) but summing
    |<phi| K_dec (K_a x K_b) |phi>|^2 over branches, which avoids forming
    density operators.  Valid because every source state is pure.
    """
    n = scheme.n
    perm = block_permutation(e.d_a, e.d_b, n)
    probs = e.probabilities()
    pairs = [np.kron(ka, kb) for ka in scheme.enc_a.kraus for kb in scheme.enc_b.kraus]
    total = 0.0
    for seq in itertools.product(range(e.size), repeat=n):
        w = float(np.prod([probs[t] for t in seq]))
        if w == 0.0:
            continue
        phi_inter = np.ones(1, dtype=np.complex128)
        for t in seq:
            phi_inter = np.kron(phi_inter, e.items[t][1])
        phi = phi_inter[perm]
        fid = 0.0
        for ke in pairs:
            mid = ke @ phi
            for kd in scheme.dec.kraus:
                fid += abs(np.vdot(phi, kd @ mid)) ** 2
        total += w * fid
    return total


def verify_channel_view_agreement(
    p: Sequence[float],
    n: int,
    m: int,
    schedules: Sequence[MaskSchedule],
    tol_abs: float = 1e-9,
    dense_check: int = 2,
) -> OracleReport:
    """Pair the qubit-level fidelity with the label-level success probability.

    Every schedule is checked through the branch-amplitude route; the first
    ``dense_check`` schedules additionally run the density-operator route,
    which must agree to machine precision.
    """
    report = OracleReport(name="channel_view_agreement", cases=len(schedules))
    ens = bell_ensemble(p)
    for idx, schedule in enumerate(schedules):
        scheme = bell_protocol_channel_view(p, n, m, schedule)
        fid = pure_branch_fidelity(ens, scheme)
        succ = hashing_success_probability(p, compile_protocol(n, m, schedule))
        if abs(fid - succ) > tol_abs:
            report.mismatches.append(
                f"schedule {idx}: fidelity {fid:.12f} vs success {succ:.12f}"
            )
        if idx < dense_check:
            dense = scheme_fidelity(ens, scheme).average_fidelity
            if abs(dense - fid) > 1e-11:
                report.mismatches.append(
                    f"schedule {idx}: dense route {dense:.12f} vs branch route {fid:.12f}"
                )
    return report


def verify_label_oracles(
    bcnot_table=None, bilateral_h_table=None, raise_on_failure: bool = True
) -> list[OracleReport]:
    """Exhaustive statevector validation of the label-algebra tables."""
    reports = [
        check_bcnot_table(bcnot_table) if bcnot_table else check_bcnot_table(),
        check_bilateral_h_table(bilateral_h_table) if bilateral_h_table else check_bilateral_h_table(),
        check_label_states_orthonormal(),
    ]
    failures = [msg for r in reports for msg in r.mismatches]
    if failures and raise_on_failure:
        raise ContractError("label oracle mismatch: " + "; ".join(failures))
    return reports
