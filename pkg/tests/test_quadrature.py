"""Quadrature grid tests: exact volumes, closed-form weighted integrals,
refinement behavior, and CSV round-trips."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergtoep import (
    AdmissibilityError,
    BALL2,
    BALL3,
    ConfigurationError,
    DISC,
    build_grid,
    convergence_estimate,
    integrate,
    load_grid_csv,
    norm_pa,
    save_grid_csv,
)

DOMAINS = (DISC, BALL2, BALL3)


def _small_grid(dom, nr=16, na=None):
    na = na or (64 if dom.dim == 1 else 8)
    return build_grid(dom, nr, na, 2.0, 1e-6)


def test_volume_exact():
    # radial GL is exact for the polynomial r^(2n-1), angles exact for
    # constants, so sum(weights) = pi^n / n! to machine precision
    for dom in DOMAINS:
        g = _small_grid(dom)
        assert g.volume_error < 1e-12 * dom.volume
        assert g.node_count == g.nodes.shape[0] == g.weights.shape[0]
        assert np.all(g.weights > 0)
        assert np.all(g.dist > 0)


def test_weighted_volume_closed_form():
    # int d(w)^a dV over the ball: Vol(S^(2n-1)) int_0^1 (1-r)^a r^(2n-1) dr
    # = (2 pi^n / (n-1)!) * B(a+1, 2n) with B the beta function
    for dom in DOMAINS:
        n = dom.dim
        for a in (0.0, 0.5, 2.0):
            g = build_grid(dom, 40, 16 if n > 1 else 64, 3.0, 1e-9)
            got = integrate(g, np.ones(g.node_count), a).real
            exact = (
                2.0 * math.pi**n / math.factorial(n - 1)
                * math.gamma(a + 1.0) * math.gamma(2.0 * n)
                / math.gamma(a + 1.0 + 2.0 * n)
            )
            assert got == pytest.approx(exact, rel=1e-8)


def test_monomial_orthogonality():
    # int z^j conj(z)^k dV = 0 for j != k on the disc (angular exactness)
    g = _small_grid(DISC)
    z = g.nodes[:, 0]
    assert abs(integrate(g, z**2 * np.conj(z) ** 3, 0)) < 1e-14
    # and pi/(k+1) for j = k
    got = integrate(g, np.abs(z) ** 4, 0).real
    assert got == pytest.approx(math.pi / 3.0, rel=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.floats(-0.9, 3.0), st.integers(0, 2))
def test_weight_positivity_and_homogeneity(a, di):
    dom = DOMAINS[di]
    g = _small_grid(dom, nr=8, na=8 if dom.dim > 1 else 16)
    vals = np.ones(g.node_count)
    v = integrate(g, vals, a).real
    assert v > 0
    # integrate is linear: scaling values scales the integral
    assert integrate(g, 3.0 * vals, a).real == pytest.approx(3.0 * v, rel=1e-14)


def test_norm_pa_scaling():
    g = _small_grid(DISC)
    f = g.nodes[:, 0] + 0.5
    for p in (1.0, 2.0, 3.5):
        base = norm_pa(g, f, p, 0.5)
        assert norm_pa(g, 2.0 * f, p, 0.5) == pytest.approx(2.0 * base, rel=1e-12)
    # p = 2, a = 0, f = 1: norm is sqrt(pi)
    assert norm_pa(g, np.ones(g.node_count), 2.0, 0.0) == pytest.approx(
        math.sqrt(math.pi), rel=1e-12
    )


def test_grading_clusters_nodes_at_boundary():
    flat = build_grid(DISC, 32, 16, 1.0, 1e-9)
    graded = build_grid(DISC, 32, 16, 4.0, 1e-9)
    assert np.min(graded.dist) < np.min(flat.dist)


def test_build_grid_validation():
    with pytest.raises(ConfigurationError):
        build_grid(DISC, 3, 64)
    with pytest.raises(ConfigurationError):
        build_grid(DISC, 16, 3)
    with pytest.raises(ConfigurationError):
        build_grid(DISC, 16, 64, grading=0.5)
    with pytest.raises(ConfigurationError):
        build_grid(DISC, 16, 64, eps_min=0.5)
    with pytest.raises(ConfigurationError):
        build_grid(DISC, 16, 64, eps_min=0.0)


def test_integrate_validation():
    g = _small_grid(DISC)
    with pytest.raises(AdmissibilityError):
        integrate(g, np.ones(g.node_count), -1.0)
    with pytest.raises(ConfigurationError):
        integrate(g, np.ones(3), 0.0)
    with pytest.raises(AdmissibilityError):
        norm_pa(g, np.ones(g.node_count), 0.5)


def test_convergence_estimate():
    grids = [build_grid(DISC, nr, 32, 2.0, 1e-9) for nr in (8, 16, 32)]
    # integrand with a mild boundary singularity: d(w)^(-1/2)
    out = convergence_estimate(
        DISC, lambda nodes: (1.0 - np.abs(nodes[:, 0])) ** -0.5, 0.0, grids
    )
    exact = 2.0 * math.pi * (math.gamma(0.5) * math.gamma(2) / math.gamma(2.5))
    assert abs(out["richardson_limit"].real - exact) < 5e-3 * exact
    assert out["error_estimate"] >= 0
    with pytest.raises(ConfigurationError):
        convergence_estimate(DISC, lambda n: np.ones(len(n)), 0.0, grids[:2])
    with pytest.raises(ConfigurationError):
        convergence_estimate(DISC, lambda n: np.ones(len(n)), 0.0, grids[::-1])


def test_grid_csv_roundtrip(tmp_path):
    for dom in (DISC, BALL2):
        g = _small_grid(dom, nr=6, na=8)
        path = tmp_path / f"{dom.name}.csv"
        save_grid_csv(g, path)
        g2 = load_grid_csv(dom, path)
        assert np.allclose(g2.nodes, g.nodes)
        assert np.allclose(g2.weights, g.weights)
        assert g2.volume_error == pytest.approx(g.volume_error, abs=1e-12)
    with pytest.raises(ConfigurationError):
        load_grid_csv(BALL3, tmp_path / "disc.csv")  # wrong column count
