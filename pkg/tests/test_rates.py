import numpy as np
import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from distqc.errors import ContractError
from distqc.linalg import shannon_entropy
from distqc.ensembles import (
    BipartiteEnsemble,
    bell_ensemble,
    hidden_orthogonality_ensemble,
    walgate_pair_ensemble,
)
from distqc.rates import (
    HybridRateReport,
    RateBounds,
    all_bounds,
    bell_region,
    caw_corner,
    detect_bell_form,
    hybrid_rate,
    irreducible_bound,
    region_export,
    slepian_wolf_bounds,
)

from conftest import random_pure

H_THIRD = shannon_entropy([2 / 3, 1 / 3])
LOG3 = np.log2(3)


def random_ensemble(rng, d_a=2, d_b=2, k=3):
    p = rng.dirichlet(np.ones(k))
    items = tuple((float(pi), random_pure(d_a * d_b, rng)) for pi in p)
    return BipartiteEnsemble(d_a, d_b, items)


def single_product_state():
    v = np.kron([1, 0], [1, 0, 0]).astype(complex)
    return BipartiteEnsemble(2, 3, ((1.0, v),))


def test_slepian_wolf_uniform_bell():
    b = slepian_wolf_bounds(bell_ensemble([0.25] * 4))
    assert b.sum_lb == pytest.approx(2.0, abs=1e-10)
    assert b.ra_lb == pytest.approx(1.0, abs=1e-10)
    assert b.rb_lb == pytest.approx(1.0, abs=1e-10)


def test_slepian_wolf_classical_correlated():
    v00 = np.zeros(4, dtype=complex); v00[0] = 1.0
    v11 = np.zeros(4, dtype=complex); v11[3] = 1.0
    e = BipartiteEnsemble(2, 2, ((0.5, v00), (0.5, v11)))
    b = slepian_wolf_bounds(e)
    assert b.sum_lb == pytest.approx(1.0, abs=1e-10)
    assert b.ra_lb == pytest.approx(0.0, abs=1e-10)
    assert b.rb_lb == pytest.approx(0.0, abs=1e-10)


def test_slepian_wolf_trivial_source():
    b = slepian_wolf_bounds(single_product_state())
    assert (b.ra_lb, b.rb_lb, b.sum_lb) == (0.0, 0.0, 0.0)


def test_irreducible_bound_hidden_orthogonality():
    b = irreducible_bound(hidden_orthogonality_ensemble(1e-3, 1e-3))
    assert b.sum_lb == pytest.approx(0.5 * H_THIRD + LOG3, abs=2e-3)
    assert b.applicability.is_product is True
    assert b.applicability.is_irreducible_joint is False  # bound not applicable


def test_irreducible_bound_bell():
    b = irreducible_bound(bell_ensemble([0.25] * 4))
    assert b.sum_lb == pytest.approx(2.0, abs=1e-10)  # (2 + H)/2 with H = 2
    assert b.applicability.is_product is False


def test_irreducible_bound_trivial():
    assert irreducible_bound(single_product_state()).sum_lb == pytest.approx(0.0, abs=1e-12)


def test_bell_region_values():
    b = bell_region([0.25] * 4)
    assert (b.ra_lb, b.rb_lb) == (1.0, 1.0)
    b = bell_region([1, 0, 0, 0])
    assert (b.ra_lb, b.rb_lb) == (0.0, 0.0)
    b = bell_region([0.5, 0.25, 0.125, 0.125])
    assert b.ra_lb == pytest.approx(0.875, abs=1e-12)
    assert b.sum_lb == pytest.approx(shannon_entropy([0.5, 0.25, 0.125, 0.125]))
    with pytest.raises(ContractError):
        bell_region([0.5, 0.5, 0.5, -0.5])


def test_caw_corner_identity_with_irreducible(rng):
    for _ in range(5):
        e = random_ensemble(rng, k=int(rng.integers(1, 5)))
        assert caw_corner(e).sum_lb == pytest.approx(irreducible_bound(e).sum_lb, abs=1e-9)


def test_caw_corner_uniform_bell():
    b = caw_corner(bell_ensemble([0.25] * 4))
    assert (1.0, 1.0) in [tuple(np.round(c, 10)) for c in b.corners]
    assert b.corners[0] == pytest.approx((1.0, 1.0), abs=1e-10)


def test_caw_corner_trivial():
    b = caw_corner(single_product_state())
    assert b.ra_lb == 0.0 and b.rb_lb == 0.0


def test_hybrid_rate_bell_parameters():
    r = hybrid_rate(0.5, 0.5, 2**-0.5, 2**-0.5, 2**-0.5, 2**-0.5)
    assert r.rate_a == pytest.approx(0.5, abs=1e-9)
    assert r.rate_b == pytest.approx(1.0, abs=1e-9)


def test_hybrid_rate_partially_entangled():
    # Frozen from a direct evaluation of the closed-form entropies:
    # q = (3/4, 1/4), H(E') = H(1/4), chi(E') = H(1/4) - (3/4)H(1/3),
    # chi(E'') = 1 + H(1/4) - 1, R_A = (3/4)H(1/3) / ((3/4)H(1/3) + H(1/4)).
    r = hybrid_rate(0.5, 0.5, 1.0, 0.0, 2**-0.5, 2**-0.5)
    h_quarter = shannon_entropy([0.75, 0.25])
    expected = (0.75 * H_THIRD) / (0.75 * H_THIRD + h_quarter)
    assert expected == pytest.approx(0.459147, abs=1e-6)
    assert r.rate_a == pytest.approx(expected, abs=1e-9)
    assert r.rate_a == pytest.approx(0.4591, abs=1e-3)
    assert r.q == pytest.approx((0.75, 0.25))


def test_hybrid_rate_single_state():
    r = hybrid_rate(1.0, 0.0, 0.8, 0.6, 2**-0.5, 2**-0.5)
    assert r.rate_a == pytest.approx(0.0, abs=1e-9)


def test_hybrid_report_invariants():
    with pytest.raises(ContractError):
        HybridRateReport(q=(0.5, 0.5), h_eprime=0.2, chi_eprime=0.5,
                         chi_edoubleprime=0.3, rate_a=0.5, rate_b=1.0)


def test_detect_bell_form():
    assert detect_bell_form(bell_ensemble([0.4, 0.3, 0.2, 0.1])) == pytest.approx(
        (0.4, 0.3, 0.2, 0.1)
    )
    assert detect_bell_form(hidden_orthogonality_ensemble(0.1, 0.1)) is None
    assert detect_bell_form(walgate_pair_ensemble(0.5, 0.5, 1.0, 0.0, 0.0, 1.0)) is None


def test_all_bounds_enables_bell_family():
    fams = [b.family for b in all_bounds(bell_ensemble([0.25] * 4))]
    assert fams == ["slepian_wolf", "irreducible", "caw_corner", "bell"]
    fams = [b.family for b in all_bounds(hidden_orthogonality_ensemble(0.1, 0.1))]
    assert "bell" not in fams


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_irreducible_dominates_slepian_wolf(seed, k):
    rng = np.random.default_rng(seed)
    e = random_ensemble(rng, d_a=int(rng.integers(2, 4)), d_b=int(rng.integers(2, 4)), k=k)
    assert irreducible_bound(e).sum_lb >= slepian_wolf_bounds(e).sum_lb - 1e-8


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_bounds_invariant_under_permutation_and_padding(seed):
    rng = np.random.default_rng(seed)
    e = random_ensemble(rng, k=3)
    perm = list(rng.permutation(3))
    shuffled = BipartiteEnsemble(e.d_a, e.d_b, tuple(e.items[i] for i in perm))
    padded = BipartiteEnsemble(
        e.d_a, e.d_b, e.items + ((0.0, random_pure(e.d_a * e.d_b, rng)),)
    )
    base = slepian_wolf_bounds(e)
    for other in (shuffled, padded):
        got = slepian_wolf_bounds(other)
        assert got.sum_lb == pytest.approx(base.sum_lb, abs=1e-10)
        assert got.ra_lb == pytest.approx(base.ra_lb, abs=1e-10)
    assert irreducible_bound(shuffled).sum_lb == pytest.approx(
        irreducible_bound(e).sum_lb, abs=1e-10
    )


def test_region_export_slepian_wolf_shape():
    csv = region_export([slepian_wolf_bounds(bell_ensemble([0.5, 0.25, 0.125, 0.125]))],
                        resolution=2)
    lines = csv.strip().split("\n")
    assert lines[0] == "family,vertex_index,RA,RB"
    assert all(line.startswith("slepian_wolf,") for line in lines[1:])
    assert len(lines) >= 5  # two rays, both corners, diagonal interior


def test_region_export_bell_quadrant():
    csv = region_export([bell_region([0.25] * 4)])
    rows = [line.split(",") for line in csv.strip().split("\n")[1:]]
    corner_rows = [r for r in rows if r[2] == "1" and r[3] == "1"]
    assert len(corner_rows) == 1


def test_region_export_empty():
    assert region_export([]) == "family,vertex_index,RA,RB\n"


def test_region_export_hybrid_point():
    b = RateBounds(family="hybrid", ra_lb=0.5, rb_lb=1.0, sum_lb=1.5,
                   corners=((0.5, 1.0),))
    csv = region_export([b])
    rows = [r.split(",") for r in csv.strip().split("\n")[1:]]
    assert all(r[0] == "hybrid" for r in rows)
    assert ["hybrid", "1", "0.5", "1"] in rows
