"""Domain, kernel, chart, and b-system tests against closed-form oracles."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergtoep import (
    BALL2,
    BALL3,
    DISC,
    ChartDomainError,
    InvalidPointError,
    b_functions,
    boundary_distance,
    bpolydisc,
    bsystem_for,
    chart_at,
    domain_from_name,
    kernel,
    kernel_diag,
    kernel_series,
    pseudo_distance,
    radial_point,
    sharp_b_ratio,
)
from bergtoep.domains import kernel_diag_values, kernel_row

DOMAINS = (DISC, BALL2, BALL3)


def _pt(dom, radius, seed):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dom.dim) + 1j * rng.standard_normal(dom.dim)
    return radius * v / np.linalg.norm(v)


# ---------------------------------------------------------------------------
# Kernel values against frozen oracles
# ---------------------------------------------------------------------------


def test_kernel_at_origin():
    # K(0,0) = n! / pi^n
    assert kernel_diag(DISC, 0.0) == pytest.approx(1.0 / math.pi, rel=1e-15)
    assert kernel_diag(BALL2, [0, 0]) == pytest.approx(2.0 / math.pi**2, rel=1e-15)
    assert kernel_diag(BALL3, [0, 0, 0]) == pytest.approx(6.0 / math.pi**3, rel=1e-15)


def test_kernel_disc_at_09():
    # 1 / (pi (1 - 0.81)^2) = 8.817441734...
    val = kernel(DISC, 0.9, 0.9)
    assert val.imag == 0.0
    assert val.real == pytest.approx(1.0 / (math.pi * 0.19**2), rel=1e-15)
    assert val.real == pytest.approx(8.81744, abs=1e-4)


def test_kernel_volume_normalization():
    # integral of K(z, .) over the domain equals 1 at z = 0 times Vol:
    # K(0, w) = n!/pi^n is constant, so K(0,0) * Vol = 1.
    for dom in DOMAINS:
        assert kernel_diag(dom, np.zeros(dom.dim)) * dom.volume == pytest.approx(
            1.0, rel=1e-15
        )


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2), st.integers(0, 10_000), st.floats(0.05, 0.9))
def test_kernel_series_agreement(di, seed, radius):
    dom = DOMAINS[di]
    z = _pt(dom, radius, seed)
    w = _pt(dom, 0.9, seed + 1)
    kc = kernel(dom, z, w)
    ks = kernel_series(dom, z, w)
    assert abs(kc - ks) / abs(kc) < 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2), st.integers(0, 10_000))
def test_kernel_hermitian(di, seed):
    dom = DOMAINS[di]
    z, w = _pt(dom, 0.8, seed), _pt(dom, 0.7, seed + 1)
    assert kernel(dom, z, w) == pytest.approx(np.conj(kernel(dom, w, z)), rel=1e-14)


def test_kernel_row_matches_scalar():
    for dom in DOMAINS:
        z = _pt(dom, 0.6, 3)
        nodes = np.stack([_pt(dom, 0.5, k) for k in range(5)])
        row = kernel_row(dom, z, nodes)
        for i in range(5):
            assert row[i] == pytest.approx(kernel(dom, z, nodes[i]), rel=1e-14)
        kd = kernel_diag_values(dom, nodes)
        for i in range(5):
            assert kd[i] == pytest.approx(kernel_diag(dom, nodes[i]), rel=1e-14)


def test_boundary_distance_and_errors():
    assert boundary_distance(DISC, 0.3) == pytest.approx(0.7)
    assert boundary_distance(BALL2, [0.6, 0.0]) == pytest.approx(0.4)
    with pytest.raises(InvalidPointError):
        boundary_distance(DISC, 1.5)
    with pytest.raises(InvalidPointError):
        kernel_diag(DISC, 1.0 - 1e-9)  # inside the interior clamp
    with pytest.raises(InvalidPointError):
        kernel(BALL2, [0.5, 0.5, 0.5], [0, 0, 0])  # wrong dimension
    with pytest.raises(ValueError):
        domain_from_name("square")


def test_radial_point():
    for dom in DOMAINS:
        v = radial_point(dom, 0.25)
        assert boundary_distance(dom, v) == pytest.approx(0.25)
        assert v[0] == 0.75


# ---------------------------------------------------------------------------
# Charts
# ---------------------------------------------------------------------------


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2), st.integers(0, 10_000))
def test_chart_unitary(di, seed):
    dom = DOMAINS[di]
    z = _pt(dom, 0.7, seed)
    ch = chart_at(dom, z)
    U = ch.unitary
    assert np.allclose(U @ U.conj().T, np.eye(dom.dim), atol=1e-12)
    zp = ch.apply(z)
    # base point lands on the positive real first axis
    assert zp[0].imag == pytest.approx(0.0, abs=1e-12)
    assert zp[0].real == pytest.approx(np.linalg.norm(z), rel=1e-12)
    assert np.allclose(zp[1:], 0.0, atol=1e-12)
    # unitarity means |det| = 1, so kernel and distance are chart-invariant
    assert ch.det_modulus == 1.0
    w = _pt(dom, 0.6, seed + 7)
    assert kernel(dom, ch.apply(z), ch.apply(w)) == pytest.approx(
        kernel(dom, z, w), rel=1e-12
    )
    assert boundary_distance(dom, ch.apply(w)) == pytest.approx(
        boundary_distance(dom, w), rel=1e-12
    )


# ---------------------------------------------------------------------------
# Pseudo-distance and b-functions
# ---------------------------------------------------------------------------


def test_pseudo_distance_diagonal():
    bs = bsystem_for(DISC)
    # delta(z, z) = 2 d(z)
    assert pseudo_distance(bs, 0.9, 0.9) == pytest.approx(0.2, rel=1e-12)
    bs2 = bsystem_for(BALL2)
    z = [0.9, 0.0]
    assert pseudo_distance(bs2, z, z) == pytest.approx(0.2, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2), st.integers(0, 10_000), st.floats(0.01, 0.2))
def test_b_functions_structure(di, seed, dd):
    dom = DOMAINS[di]
    bs = bsystem_for(dom)
    z = radial_point(dom, dd)
    w = z * (1.0 - 0.1 * dd)
    delta = pseudo_distance(bs, z, w)
    b = b_functions(bs, z, w)
    assert b[0] == pytest.approx(1.0 / delta, rel=1e-12)
    for j in range(1, dom.dim):
        assert b[j] == pytest.approx(delta ** -0.5, rel=1e-12)


def test_chart_neighbourhood_enforced():
    bs = bsystem_for(DISC)
    with pytest.raises(ChartDomainError):
        pseudo_distance(bs, 0.9, -0.9)


def test_sharp_b_ratio_diagonal_oracle():
    # disc at z = 0.9: K(z,z) = 1/(pi d^2 (2-d)^2), b_1^2 = 1/(2d)^2, so the
    # ratio is 4 / (pi (2-d)^2)
    d = 0.1
    out = sharp_b_ratio(DISC, bsystem_for(DISC), 0.9, 0.9)
    expected = 4.0 / (math.pi * (2.0 - d) ** 2)
    assert out["diag_ratio"] == pytest.approx(expected, rel=1e-12)
    assert out["diag_ratio"] == pytest.approx(0.35270, abs=5e-6)


def test_sharp_b_ratio_bounded_along_boundary():
    # two-sided comparison: the ratio stays in a fixed bracket as d -> 0
    for dom in DOMAINS:
        bs = bsystem_for(dom)
        ratios = []
        for d in (0.1, 0.03, 0.01, 3e-3, 1e-3):
            z = radial_point(dom, d)
            w = radial_point(dom, 1.5 * d)
            out = sharp_b_ratio(dom, bs, z, w)
            ratios += [out["diag_ratio"], out["offdiag_ratio"]]
        ratios = np.asarray(ratios)
        assert np.all(ratios > 1e-3)
        assert np.all(ratios < 1e3)
        assert np.max(ratios) / np.min(ratios) < 50.0


def test_bpolydisc_contained_and_comparable():
    for dom in DOMAINS:
        bs = bsystem_for(dom)
        for d in (0.1, 0.01):
            out = bpolydisc(bs, radial_point(dom, d), lam=0.2)
            assert out["contained"]
            assert out["volume"] > 0
            # kernel and distance vary by a bounded factor on the polydisc;
            # the factor is uniform in d (same bound at d = 0.1 and 0.01)
            assert out["kernel_variation"] < 100.0
            assert out["distance_variation"] < 10.0
