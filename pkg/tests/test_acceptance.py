"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as they
complete.  Expected values marked as derived below come from the independent
oracle implementations in this file and in distqc.oracles, never from the
code paths under test.
"""

import itertools
import math
import time

import numpy as np
import pytest

from distqc.errors import ContractError
from distqc.linalg import (
    DensityOperator,
    Povm,
    hermitian_eigen,
    holevo_chi,
    partial_trace,
    shannon_entropy,
    vn_entropy,
)
from distqc.ensembles import (
    bell_ensemble,
    erasure_code_vectors,
    hidden_orthogonality_ensemble,
    hidden_orthogonality_vectors,
)
from distqc.rates import bell_region, hybrid_rate, irreducible_bound, slepian_wolf_bounds
from distqc.hashing import (
    ABSTRACT,
    COMPILED,
    LabelString,
    MaskSchedule,
    McConfig,
    collision_probe,
    compile_protocol,
    decode,
    observe,
    run_monte_carlo,
    sample_label_string,
    schedule_constraints_ok,
)
from distqc.oracles import (
    check_bcnot_table,
    check_bilateral_h_table,
    exhaustive_ml_decode,
)
from distqc.simulate import (
    erasure_correctable,
    gentle_measurement_check,
    hidden_orthogonality_asymptotic_rates,
    hidden_orthogonality_fidelity,
    hidden_orthogonality_scheme,
    scheme_fidelity,
    verify_channel_view_agreement,
)

from conftest import random_density, random_unitary

P_PRIMES = (7 / 17, 5 / 17, 3 / 17, 2 / 17)


def _report(num, elapsed, budget, desc):
    print(f"ACCEPTANCE {num:02d} PASS ({elapsed:.1f}s / budget {budget:.0f}s): {desc}")
    assert elapsed < budget, f"criterion {num} exceeded its runtime budget"


# ---------------------------------------------------------------------------
# 1. Rate numbers
# ---------------------------------------------------------------------------


def test_acceptance_01_rate_numbers():
    t0 = time.time()
    h23 = shannon_entropy([2 / 3, 1 / 3])

    bell = bell_region([0.25] * 4)
    assert bell.corners[0] == pytest.approx((1.0, 1.0), abs=1e-12)

    asym = hidden_orthogonality_asymptotic_rates(1e-3, 1e-3)
    assert asym["rate_sum"] == pytest.approx(1.8366, abs=1e-3)
    assert asym["rate_sum"] == pytest.approx(2 * h23, abs=1e-9)

    irr = irreducible_bound(hidden_orthogonality_ensemble(1e-3, 1e-3))
    assert irr.sum_lb == pytest.approx(2.0441, abs=2e-3)
    assert irr.sum_lb == pytest.approx(0.5 * h23 + math.log2(3), abs=2e-3)
    assert irr.applicability.is_irreducible_joint is False

    for p in ([0.25] * 4, [0.5, 0.25, 0.125, 0.125]):
        h = shannon_entropy(p)
        sw = slepian_wolf_bounds(bell_ensemble(p))
        assert sw.sum_lb == pytest.approx(h, abs=1e-10)
        assert sw.ra_lb == pytest.approx(max(0.0, h - 1), abs=1e-10)
        assert sw.rb_lb == pytest.approx(max(0.0, h - 1), abs=1e-10)
        assert irreducible_bound(bell_ensemble(p)).sum_lb == pytest.approx(
            (2 + h) / 2, abs=1e-10
        )

    hyb = hybrid_rate(0.5, 0.5, 2**-0.5, 2**-0.5, 2**-0.5, 2**-0.5)
    assert hyb.rate_a == pytest.approx(0.5, abs=1e-9)

    _report(1, time.time() - t0, 1.0, "rate formulas reproduce the published numbers")


# ---------------------------------------------------------------------------
# 2. Bilateral-CNOT semantics
# ---------------------------------------------------------------------------


def test_acceptance_02_label_gate_semantics():
    t0 = time.time()
    bcnot = check_bcnot_table()
    assert bcnot.passed and bcnot.cases == 16, bcnot.mismatches
    bh = check_bilateral_h_table()
    assert bh.passed and bh.cases == 4, bh.mismatches
    _report(2, time.time() - t0, 1.0,
            "all 16 bilateral-CNOT and 4 bilateral-H label cases match the statevector oracle")


# ---------------------------------------------------------------------------
# 3. Zero-collision property
# ---------------------------------------------------------------------------


def test_acceptance_03_zero_collision():
    t0 = time.time()
    rng = np.random.default_rng(303)
    # Exhaustive over difference patterns at n <= 4, both modes.
    for mode in (ABSTRACT, COMPILED):
        for n in range(1, 5):
            for m in range(1, n + 1):
                for _ in range(10):
                    sys_ = compile_protocol(n, m, MaskSchedule.random(n, m, mode, rng))
                    for d_c in range(1, 1 << (2 * m)):
                        assert observe(LabelString(n=n, bits=d_c), sys_) != 0
    # Literal pair form at n = 2, m = 1 (same waste bits, different channel bits).
    for mode in (ABSTRACT, COMPILED):
        sys_ = compile_protocol(2, 1, MaskSchedule.random(2, 1, mode, rng))
        for xb in range(16):
            for yb in range(16):
                x, y = LabelString(n=2, bits=xb), LabelString(n=2, bits=yb)
                if x.w_bits(1) == y.w_bits(1) and x.c_bits(1) != y.c_bits(1):
                    assert observe(x, sys_) != observe(y, sys_)
    # Randomized at n = 16: ten thousand pairs, zero violations.
    n = 16
    checked = 0
    while checked < 10_000:
        mode = ABSTRACT if checked % 2 else COMPILED
        m = int(rng.integers(1, n))
        sys_ = compile_protocol(n, m, MaskSchedule.random(n, m, mode, rng))
        for _ in range(20):
            d_c = int(rng.integers(1, 1 << (2 * m)))
            x_bits = int(rng.integers(0, 1 << (2 * n)))
            x = LabelString(n=n, bits=x_bits)
            y = LabelString(n=n, bits=x_bits ^ d_c)
            assert observe(x, sys_) != observe(y, sys_)
            checked += 1
    _report(3, time.time() - t0, 30.0,
            "equal-waste differing-channel strings never collide (exhaustive n<=4, 1e4 pairs n=16)")


# ---------------------------------------------------------------------------
# 4. Collision rate for differing waste bits
# ---------------------------------------------------------------------------


def test_acceptance_04_collision_rate():
    t0 = time.time()
    trials = 100_000
    rng = np.random.default_rng(404)
    for m in (1, 2, 3):
        n = m + 2
        x = LabelString(n=n, bits=0b01 << (2 * m))      # waste pair m differs
        y = LabelString(n=n, bits=0b10 << (2 * m))
        rate = collision_probe(x, y, n, m, trials, rng, mode=ABSTRACT)
        expect = 2.0 ** (-2 * m)
        sigma = math.sqrt(expect * (1 - expect) / trials)
        assert abs(rate - expect) <= 4 * sigma, (m, rate, expect, sigma)
    _report(4, time.time() - t0, 60.0,
            "schedule-collision rate matches 2^-2m within 4 sigma at m in {1,2,3}")


# ---------------------------------------------------------------------------
# 5. Monte Carlo failure rate vs the analytic bound
# ---------------------------------------------------------------------------


def test_acceptance_05_monte_carlo_failure():
    t0 = time.time()
    p = (0.5, 0.5, 0.0, 0.0)
    n, delta = 24, 0.15
    reports = {}
    for mode in (ABSTRACT, COMPILED):
        reports[mode] = run_monte_carlo(
            McConfig(p=p, n=n, m=16, trials=2000, delta=delta, mode=mode, seed=505)
        )
        assert reports[mode].empirical_failure_rate <= 0.1
        assert reports[mode].paper_bound == pytest.approx(2.0 ** (-4.4), rel=1e-12)

    grid = {16: reports[ABSTRACT]}
    for m in (14, 18):
        grid[m] = run_monte_carlo(
            McConfig(p=p, n=n, m=m, trials=600, delta=delta, mode=ABSTRACT, seed=505)
        )

    def pooled_sigma(r1, r2):
        pooled = (r1.failures + r2.failures) / (r1.trials + r2.trials)
        pooled = min(max(pooled, 1e-6), 1 - 1e-6)
        return math.sqrt(pooled * (1 - pooled) * (1 / r1.trials + 1 / r2.trials))

    for m_small, m_large in ((14, 16), (16, 18)):
        r_small, r_large = grid[m_small], grid[m_large]
        slack = 3 * pooled_sigma(r_small, r_large)
        assert r_large.empirical_failure_rate <= r_small.empirical_failure_rate + slack

    ra, rc = reports[ABSTRACT], reports[COMPILED]
    assert abs(ra.empirical_failure_rate - rc.empirical_failure_rate) <= 3 * pooled_sigma(ra, rc)

    _report(5, time.time() - t0, 300.0,
            f"failure rates abstract={ra.empirical_failure_rate:.4f} "
            f"compiled={rc.empirical_failure_rate:.4f} <= 0.1 (bound {ra.paper_bound:.4f}), "
            "monotone in m, modes agree")


# ---------------------------------------------------------------------------
# 6. Decoder optimality
# ---------------------------------------------------------------------------


def test_acceptance_06_decoder_optimality():
    t0 = time.time()
    rng = np.random.default_rng(606)
    for k in range(200):
        n = int(rng.integers(3, 7))
        m = int(rng.integers(1, n + 1))
        mode = COMPILED if k % 2 else ABSTRACT
        p = rng.dirichlet(np.ones(4) * 0.8)
        x = sample_label_string(p, n, rng)
        sys_ = compile_protocol(n, m, MaskSchedule.random(n, m, mode, rng))
        obs = observe(x, sys_)
        got = decode(obs, sys_, p)
        winners, consistent = exhaustive_ml_decode(obs, sys_, p)
        assert consistent == 1 << (2 * (n - m))
        if got.tie:
            assert len(winners) >= 2
        else:
            assert winners == [got.label.bits]
        assert got.best.bits == winners[0]
    _report(6, time.time() - t0, 120.0,
            "coset decoder equals exhaustive maximum likelihood on 200 instances, n in 3..6")


# ---------------------------------------------------------------------------
# 7. Hidden-orthogonality protocol
# ---------------------------------------------------------------------------


def _ho_accounting_oracle(alpha, beta, n, delta):
    """Typical-mass accounting route for the protocol fidelity.

    Uses only per-copy overlap scalars and surprisal count combinatorics:
    F = avg over sequences of
        (mass_A^2 + (1-mass_A) |<f_A|a>|^2) (mass_B^2 + (1-mass_B) |<f_B|b'>|^2),
    where mass is the typical-subspace weight of the local product vector and
    f the first typical eigenbasis sequence.  Derived from the branch algebra
    of the correction step: the replaced axis contributes |1>|0> exactly and
    every cross term carries a |2> factor that the compressed register cannot
    hold.
    """
    a_states, b_states = hidden_orthogonality_vectors(alpha, beta)
    b_prime = [b.copy() for b in b_states]
    b_prime[2] = np.array([1, 0, 0], dtype=complex)  # |2> outcome relabeled

    def side_tables(states, dim):
        avg = sum(np.outer(v, v.conj()) for v in states) / len(states)
        w, vecs = np.linalg.eigh(avg)
        w, vecs = w[::-1], vecs[:, ::-1]
        surp = np.array([-np.log2(x) if x > 1e-12 else np.inf for x in w])
        entropy = float(sum(x * s for x, s in zip(w, surp) if np.isfinite(s)))
        overlap = np.array(
            [[abs(np.vdot(vecs[:, e], v)) ** 2 for e in range(dim)] for v in states]
        )
        return w, surp, entropy, overlap

    w_a, surp_a, s_a, o_a = side_tables(a_states, 2)
    w_b, surp_b, s_b, o_b = side_tables(b_prime, 3)

    def typical_counts(surp, entropy, d):
        # sequences containing an infinite-surprisal index are never typical
        finite = [e for e in range(d) if np.isfinite(surp[e])]
        ok = set()
        for counts in itertools.product(range(n + 1), repeat=len(finite)):
            if sum(counts) != n:
                continue
            mean = sum(c * surp[e] for c, e in zip(counts, finite)) / n
            if abs(mean - entropy) <= delta + 1e-12:
                ok.add(counts)
        return finite, ok

    fin_a, typ_a = typical_counts(surp_a, s_a, 2)
    fin_b, typ_b = typical_counts(surp_b, s_b, 3)

    def first_typical(surp, entropy, d):
        for idx in range(d**n):
            digits = [(idx // d ** (n - 1 - t)) % d for t in range(n)]
            if any(not np.isfinite(surp[e]) for e in digits):
                continue
            mean = sum(surp[e] for e in digits) / n
            if abs(mean - entropy) <= delta + 1e-12:
                return digits
        raise AssertionError("empty typical set in the oracle")

    fix_a = first_typical(surp_a, s_a, 2)
    fix_b = first_typical(surp_b, s_b, 3)

    def mass(seq, overlap, finite, typical):
        # fold the per-copy overlap weights into count-vector coefficients
        coeffs = {tuple([0] * len(finite)): 1.0}
        for i in seq:
            nxt = {}
            for counts, c in coeffs.items():
                for slot, e in enumerate(finite):
                    inc = list(counts)
                    inc[slot] += 1
                    nxt[tuple(inc)] = nxt.get(tuple(inc), 0.0) + c * overlap[i, e]
            coeffs = nxt
        return sum(c for counts, c in coeffs.items() if counts in typical)

    total = 0.0
    for seq in itertools.product(range(3), repeat=n):
        ma = mass(seq, o_a, fin_a, typ_a)
        mb = mass(seq, o_b, fin_b, typ_b)
        fa = ma**2 + (1 - ma) * np.prod([o_a[i, e] for i, e in zip(seq, fix_a)])
        fb = mb**2 + (1 - mb) * np.prod([o_b[i, e] for i, e in zip(seq, fix_b)])
        total += (3.0**-n) * fa * fb
    return 1.0 - total


def test_acceptance_07_hidden_orthogonality():
    t0 = time.time()
    dense = scheme_fidelity(
        hidden_orthogonality_ensemble(0.01, 0.01),
        hidden_orthogonality_scheme(0.01, 0.01, 1, 0.25, full_rate=True),
    )
    assert dense.average_fidelity == pytest.approx(1.0, abs=1e-12)
    structured = hidden_orthogonality_fidelity(0.01, 0.01, 1, 0.25, full_rate=True)
    assert structured.average_fidelity == pytest.approx(1.0, abs=1e-12)

    f8 = hidden_orthogonality_fidelity(0.01, 0.01, 8, 0.25).average_fidelity
    deficit = _ho_accounting_oracle(0.01, 0.01, 8, 0.25)
    assert f8 == pytest.approx(1.0 - deficit, abs=1e-9)

    f2 = hidden_orthogonality_fidelity(0.01, 0.01, 2, 0.25).average_fidelity
    assert f8 > f2

    _report(7, time.time() - t0, 120.0,
            f"single-copy fidelity 1; n=8 fidelity {f8:.6f} = 1 - typical deficit "
            f"{deficit:.6f} within 1e-9 and exceeds n=2 value {f2:.6f}")


# ---------------------------------------------------------------------------
# 8. Erasure code feasibility
# ---------------------------------------------------------------------------


def test_acceptance_08_erasure_code():
    t0 = time.time()
    basis = erasure_code_vectors()
    for q in (1, 2, 3, 4):
        ok, residuals = erasure_correctable(basis, q)
        assert ok and max(residuals.values()) <= 1e-8, (q, residuals)
    v0 = np.zeros(16, dtype=complex); v0[0] = 1.0
    v1 = np.zeros(16, dtype=complex); v1[15] = 1.0
    s = 1 / math.sqrt(2)
    ok, residuals = erasure_correctable([s * (v0 + v1), s * (v0 - v1)], 1)
    assert not ok and residuals["Z"] > 1e-8
    _report(8, time.time() - t0, 1.0,
            "codeword subspace corrects every known-position erasure; repetition span rejected")


# ---------------------------------------------------------------------------
# 9. Cross-representation agreement
# ---------------------------------------------------------------------------


def _all_compiled_schedules(n, m):
    width = 2 * (n - m)
    if width == 0:
        return [MaskSchedule(n=n, m=m, masks=(0,) * (2 * m), mode=COMPILED)]
    out = []
    for masks in itertools.product(range(1 << width), repeat=2 * m):
        if schedule_constraints_ok(masks, n, m):
            out.append(MaskSchedule(n=n, m=m, masks=masks, mode=COMPILED))
    return out


def test_acceptance_09_channel_view_agreement():
    t0 = time.time()
    total = 0
    for n, m in ((1, 1), (2, 1), (2, 2), (3, 1), (3, 2), (3, 3)):
        schedules = _all_compiled_schedules(n, m)
        total += len(schedules)
        report = verify_channel_view_agreement(P_PRIMES, n, m, schedules, dense_check=2)
        assert report.passed, report.mismatches[:4]
    _report(9, time.time() - t0, 120.0,
            f"qubit-level fidelity equals label-level success on all {total} schedules, n<=3")


# ---------------------------------------------------------------------------
# 10. Numeric foundation properties
# ---------------------------------------------------------------------------


def test_acceptance_10_numeric_foundation():
    t0 = time.time()
    rng = np.random.default_rng(1010)
    for _ in range(50):
        da, db = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        a, b = random_density(da, rng), random_density(db, rng)
        joint = DensityOperator(np.kron(a.mat, b.mat))
        assert abs(vn_entropy(joint) - vn_entropy(a) - vn_entropy(b)) <= 1e-8

        rho = random_density(da * db, rng)
        sa = vn_entropy(partial_trace(rho, [da, db], [0]))
        sb = vn_entropy(partial_trace(rho, [da, db], [1]))
        assert vn_entropy(rho) <= sa + sb + 1e-8

        u = random_unitary(da, rng)
        assert abs(vn_entropy(DensityOperator(u @ a.mat @ u.conj().T)) - vn_entropy(a)) <= 1e-8

        k = int(rng.integers(2, 5))
        p = rng.dirichlet(np.ones(k))
        states = [random_density(da, rng, rank=int(rng.integers(1, da + 1))) for _ in range(k)]
        chi = holevo_chi(p, states)
        avg = DensityOperator(sum(pi * s.mat for pi, s in zip(p, states)))
        assert -1e-8 <= chi <= vn_entropy(avg) + 1e-8

        dim = int(rng.integers(2, 9))
        g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        h = g + g.conj().T
        w, v = hermitian_eigen(h)  # residual/orthonormality asserted internally
        resid = np.linalg.norm(h @ v - v * w, axis=0)
        assert np.max(resid) <= 1e-8 * max(1.0, np.linalg.norm(h, 2))

    lam = 0.05
    for _ in range(100):
        u = random_unitary(2, rng)
        e1, e2 = rng.uniform(0, 0.04, size=2)
        eff0 = u @ np.diag([1 - e1, e2]) @ u.conj().T
        povm = Povm([eff0, np.eye(2) - eff0])
        states = [
            DensityOperator(u @ np.diag([1.0, 0.0]) @ u.conj().T),
            DensityOperator(u @ np.diag([0.0, 1.0]) @ u.conj().T),
        ]
        rep = gentle_measurement_check(states, povm, [0, 1], lam)
        assert rep.holds

    _report(10, time.time() - t0, 60.0,
            "entropy identities, Holevo bounds, eigensolver residuals and the "
            "gentle-measurement bound all hold on random instances")
