"""Rate-region lower bounds and rate formulas for bipartite sources.

Every family is computed on request and tagged with applicability flags
instead of refusing out-of-hypothesis ensembles, so comparison tables always
have a number.  Negative conditional entropies are clamped to 0 in the bound
fields with the raw value kept in the note.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, DegenerateRateError
from .linalg import (
    DEFAULT_TOL,
    DensityOperator,
    Tolerances,
    partial_trace_mat,
    shannon_entropy,
    vn_entropy,
)
from .ensembles import (
    BELL_VECTORS,
    BipartiteEnsemble,
    average_state,
    is_product_ensemble,
    is_reducible,
)


@dataclass(frozen=True)
class Applicability:
    is_product: bool | None = None
    is_irreducible_joint: bool | None = None
    is_bell_form: bool | None = None


@dataclass(frozen=True)
class RateBounds:
    family: str
    ra_lb: float | None
    rb_lb: float | None
    sum_lb: float | None
    applicability: Applicability = field(default_factory=Applicability)
    note: str = ""
    corners: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        for v in (self.ra_lb, self.rb_lb, self.sum_lb):
            if v is not None and (not np.isfinite(v) or v < 0):
                raise ContractError(f"bound {v} must be finite and >= 0")


def _entropies(e: BipartiteEnsemble, tol: Tolerances):
    rho = average_state(e, tol=tol)
    dims = [e.d_a, e.d_b]
    s_ab = vn_entropy(rho, tol=tol)
    s_a = vn_entropy(DensityOperator(partial_trace_mat(rho.mat, dims, [0]), tol=tol), tol=tol)
    s_b = vn_entropy(DensityOperator(partial_trace_mat(rho.mat, dims, [1]), tol=tol), tol=tol)
    return s_a, s_b, s_ab


def slepian_wolf_bounds(e: BipartiteEnsemble, tol: Tolerances = DEFAULT_TOL) -> RateBounds:
    """R_A >= S(A|B), R_B >= S(B|A), R_A + R_B >= S(AB) on the average state."""
    s_a, s_b, s_ab = _entropies(e, tol)
    ra_raw, rb_raw = s_ab - s_b, s_ab - s_a
    note = f"raw conditional entropies S(A|B)={ra_raw:.9g}, S(B|A)={rb_raw:.9g}"
    return RateBounds(
        family="slepian_wolf",
        ra_lb=max(0.0, ra_raw),
        rb_lb=max(0.0, rb_raw),
        sum_lb=max(0.0, s_ab),
        note=note,
        corners=(
            (max(0.0, ra_raw), s_b),
            (s_a, max(0.0, rb_raw)),
        ),
    )


def irreducible_bound(e: BipartiteEnsemble, tol: Tolerances = DEFAULT_TOL) -> RateBounds:
    """Rate-sum bound (S(E_A) + S(E_B) + S(E_AB)) / 2 for irreducible product sources.

    The number is reported for every ensemble; the applicability flags say
    whether the hypotheses (product states, jointly irreducible) actually hold.
    """
    s_a, s_b, s_ab = _entropies(e, tol)
    product = is_product_ensemble(e)
    reducible, _ = is_reducible(e.vectors())
    notes = []
    if not product:
        notes.append("hypothesis failed: states are not all product states")
    if reducible:
        notes.append("hypothesis failed: joint ensemble is reducible")
    return RateBounds(
        family="irreducible",
        ra_lb=None,
        rb_lb=None,
        sum_lb=max(0.0, 0.5 * (s_a + s_b + s_ab)),
        applicability=Applicability(
            is_product=product, is_irreducible_joint=not reducible
        ),
        note="; ".join(notes) if notes else "hypotheses hold",
    )


def bell_region(p, tol: Tolerances = DEFAULT_TOL) -> RateBounds:
    """Optimal Bell-source region: R_A >= H/2 and R_B >= H/2."""
    q = np.asarray([float(x) for x in p], dtype=np.float64)
    if q.shape != (4,):
        raise ContractError("bell region needs four probabilities")
    h = shannon_entropy(q, tol=tol)
    return RateBounds(
        family="bell",
        ra_lb=h / 2,
        rb_lb=h / 2,
        sum_lb=h,
        applicability=Applicability(is_bell_form=True),
        corners=((h / 2, h / 2),),
    )


def caw_corner(e: BipartiteEnsemble, tol: Tolerances = DEFAULT_TOL) -> RateBounds:
    """Corner points (S_A, (S_B+S_AB-S_A)/2) and the mirrored one, plus the
    per-party lower bounds of the density-operator source model."""
    s_a, s_b, s_ab = _entropies(e, tol)
    ra_raw = 0.5 * (s_a + s_ab - s_b)
    rb_raw = 0.5 * (s_b + s_ab - s_a)
    corner_a_heavy = (s_a, max(0.0, rb_raw))
    corner_b_heavy = (max(0.0, ra_raw), s_b)
    return RateBounds(
        family="caw_corner",
        ra_lb=max(0.0, ra_raw),
        rb_lb=max(0.0, rb_raw),
        sum_lb=max(0.0, 0.5 * (s_a + s_b + s_ab)),
        note=f"raw per-party bounds RA>={ra_raw:.9g}, RB>={rb_raw:.9g}",
        corners=(corner_a_heavy, corner_b_heavy),
    )


@dataclass(frozen=True)
class HybridRateReport:
    q: tuple[float, float]
    h_eprime: float
    chi_eprime: float
    chi_edoubleprime: float
    rate_a: float
    rate_b: float

    def __post_init__(self):
        if not (self.h_eprime >= self.chi_eprime - 1e-8 and self.chi_eprime >= -1e-8):
            raise ContractError("expected H(E') >= chi(E') >= 0")
        if not (-1e-12 <= self.rate_a <= 1.0 + 1e-12):
            raise ContractError(f"rate_a {self.rate_a} outside [0, 1]")


def hybrid_rate(
    p0: float,
    p1: float,
    alpha0: float,
    beta0: float,
    alpha1: float,
    beta1: float,
    tol: Tolerances = DEFAULT_TOL,
) -> HybridRateReport:
    """Piggyback strategy rates for a pair of orthogonal two-qubit states.

    Alice measures most copies in the computational basis and encodes the
    partition-code index on the rest with randomizing unitaries; Bob forwards
    his qubits at his local entropy rate.
    """
    for a, b in ((alpha0, beta0), (alpha1, beta1)):
        if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > 1e-9:
            raise ContractError("amplitudes must satisfy |alpha|^2 + |beta|^2 = 1")
    if abs(p0 + p1 - 1.0) > 1e-9 or p0 < 0 or p1 < 0:
        raise ContractError("probabilities must be nonnegative and sum to 1")

    p = np.array([p0, p1])
    amps = np.array([[alpha0, beta0], [alpha1, beta1]], dtype=np.complex128)
    # Outcome probabilities and Bob's conditional states in the standard basis.
    q0 = float(p0 * abs(alpha0) ** 2 + p1 * abs(alpha1) ** 2)
    q1 = 1.0 - q0
    omega = []
    for j, col in enumerate((0, 1)):
        diag = np.zeros(2)
        # outcome 0 leaves Bob with |i>, outcome 1 with |1-i>
        w0 = p0 * abs(amps[0, col]) ** 2
        w1 = p1 * abs(amps[1, col]) ** 2
        if j == 0:
            diag[0], diag[1] = w0, w1
        else:
            diag[1], diag[0] = w0, w1
        omega.append(diag)
    h_eprime = shannon_entropy([q0, q1], tol=tol) if min(q0, q1) >= 0 else 0.0

    def _h(diag):
        s = diag.sum()
        if s <= 0:
            return 0.0
        lam = diag / s
        lam = lam[lam > 0]
        return float(-np.sum(lam * np.log2(lam)))

    avg_b = omega[0] + omega[1]
    chi_eprime = _h(avg_b) - (q0 * _h(omega[0]) + q1 * _h(omega[1]))

    # Joint and marginal entropies of the source average.
    vecs = [
        np.array([alpha0, 0, 0, beta0], dtype=np.complex128),
        np.array([0, alpha1, beta1, 0], dtype=np.complex128),
    ]
    rho_ab = sum(pi * np.outer(v, v.conj()) for pi, v in zip(p, vecs))
    s_ab = vn_entropy(DensityOperator(rho_ab, tol=tol), tol=tol)
    rho_b = partial_trace_mat(rho_ab, [2, 2], [1])
    s_b = vn_entropy(DensityOperator(rho_b, tol=tol), tol=tol)
    chi_edoubleprime = 1.0 + s_b - s_ab  # log2(dim A) = 1 for the two-qubit setting

    numer = h_eprime - chi_eprime
    denom = numer + chi_edoubleprime
    if abs(denom) <= tol.eig:
        raise DegenerateRateError(
            "H(E') - chi(E') + chi(E'') vanishes; the hybrid rate is undefined here"
        )
    rate_a = numer / denom
    return HybridRateReport(
        q=(q0, q1),
        h_eprime=h_eprime,
        chi_eprime=max(0.0, chi_eprime),
        chi_edoubleprime=chi_edoubleprime,
        rate_a=min(1.0, max(0.0, rate_a)),
        rate_b=s_b,
    )


def detect_bell_form(e: BipartiteEnsemble, tol: float = 1e-8):
    """Probabilities aligned to the Bell-label order when the ensemble is four
    Bell vectors up to global phase, else None."""
    if e.d_a != 2 or e.d_b != 2 or e.size != 4:
        return None
    p = [None] * 4
    for prob, v in e.items:
        matches = [k for k, b in enumerate(BELL_VECTORS) if abs(abs(np.vdot(b, v)) - 1.0) <= tol]
        if len(matches) != 1 or p[matches[0]] is not None:
            return None
        p[matches[0]] = prob
    return tuple(p)


def all_bounds(e: BipartiteEnsemble, tol: Tolerances = DEFAULT_TOL) -> list[RateBounds]:
    out = [slepian_wolf_bounds(e, tol), irreducible_bound(e, tol), caw_corner(e, tol)]
    bell_p = detect_bell_form(e)
    if bell_p is not None:
        out.append(bell_region(bell_p, tol))
    return out


# ---------------------------------------------------------------------------
# Region export
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def region_polyline(b: RateBounds, extent: float, resolution: int):
    """Boundary vertices for one family, left-to-right in R_A."""
    pts: list[tuple[float, float]] = []

    def diagonal(p0, p1):
        steps = max(1, resolution)
        for k in range(1, steps):
            t = k / steps
            pts.append((p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1])))

    if b.family in ("slepian_wolf", "caw_corner"):
        left, right = sorted(b.corners)[0], sorted(b.corners)[1]
        pts.append((left[0], extent))
        pts.append(left)
        diagonal(left, right)
        pts.append(right)
        pts.append((extent, right[1]))
    elif b.family == "bell":
        c = b.corners[0]
        pts.append((c[0], extent))
        pts.append(c)
        pts.append((extent, c[1]))
    elif b.family == "irreducible":
        s = b.sum_lb or 0.0
        pts.append((0.0, s))
        diagonal((0.0, s), (s, 0.0))
        pts.append((s, 0.0))
    elif b.family == "hybrid":
        c = b.corners[0] if b.corners else (b.ra_lb or 0.0, b.rb_lb or 0.0)
        pts.append((c[0], extent))
        pts.append(c)
        pts.append((extent, c[1]))
    else:
        raise ContractError(f"unknown bound family {b.family!r}")
    return pts


def region_export(bounds, resolution: int = 8) -> str:
    """CSV of boundary polylines: family,vertex_index,RA,RB with LF endings."""
    buf = io.StringIO()
    buf.write("family,vertex_index,RA,RB\n")
    finite = [
        v
        for b in bounds
        for v in (b.ra_lb, b.rb_lb, b.sum_lb)
        if v is not None
    ] + [c for b in bounds for corner in b.corners for c in corner]
    extent = (max(finite) if finite else 1.0) * 1.25 + 0.25
    for b in bounds:
        for idx, (ra, rb) in enumerate(region_polyline(b, extent, resolution)):
            buf.write(f"{b.family},{idx},{_fmt(ra)},{_fmt(rb)}\n")
    return buf.getvalue()
