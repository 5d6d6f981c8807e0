"""Toeplitz operator tests: symbols, exponent criteria, the radial Galerkin
oracle, Nystrom spectra, norm brackets, essential norm, Berezin, Schatten."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bergtoep import (
    AdmissibilityError,
    BALL2,
    ConfigurationError,
    DISC,
    ExhaustionSpec,
    M_quantity,
    M_sweep,
    SpaceParams,
    SymbolSpec,
    UnsupportedSymbolError,
    apply_toeplitz,
    assemble_nystrom,
    berezin,
    boundary_exponent,
    boundedness_criterion,
    build_grid,
    compactness_criterion,
    disc_l2_norm,
    essential_norm,
    galerkin_radial_eigs,
    global_bound_check,
    leading_singular_values,
    op_norm,
    op_norm_lower_batch,
    oracle_singular_values,
    schatten_criterion,
    schatten_norm_estimate,
    singular_values,
    symbol_eval,
    symbol_values,
    trace_identity_check,
    truncate_symbol,
)
from bergtoep.domains import kernel_row, radial_point
from bergtoep.toeplitz import SingularSpectrum, resolution_distance


@pytest.fixture(scope="module")
def grid60():
    return build_grid(DISC, 60, 64, 2.0, 1e-6)


# ---------------------------------------------------------------------------
# Symbols
# ---------------------------------------------------------------------------


def test_symbol_spec_validation():
    with pytest.raises(AdmissibilityError):
        SymbolSpec.power(-0.5, 0.0)
    with pytest.raises(AdmissibilityError):
        SymbolSpec.sampled(np.array([1.0, -0.1]))
    spec = SymbolSpec.power(0.5, 1.0)
    sq = spec.squared()
    assert (sq.alpha, sq.beta) == (1.0, 2.0)
    with pytest.raises(UnsupportedSymbolError):
        spec.scaled(2.0)
    samp = SymbolSpec.sampled(np.array([1.0, 2.0]))
    assert samp.scaled(3.0).ess_sup == 6.0


def test_symbol_values_match_pointwise(grid60):
    spec = SymbolSpec.power(0.3, 0.7)
    vals = symbol_values(DISC, spec, grid60)
    for i in (0, 100, 2000):
        assert vals[i] == pytest.approx(
            symbol_eval(DISC, spec, grid60.nodes[i]), rel=1e-12
        )
    with pytest.raises(ConfigurationError):
        symbol_values(DISC, SymbolSpec.sampled(np.ones(3)), grid60)


def test_truncate_symbol(grid60):
    spec = SymbolSpec.power(0.0, 1.0)
    tail = truncate_symbol(DISC, grid60, spec, 0.1, tail=True)
    head = truncate_symbol(DISC, grid60, spec, 0.1, tail=False)
    full = symbol_values(DISC, spec, grid60)
    assert np.allclose(tail.values + head.values, full)
    assert np.all(tail.values[grid60.dist >= 0.1] == 0.0)


# ---------------------------------------------------------------------------
# M and the exponent criteria
# ---------------------------------------------------------------------------


@settings(max_examples=25, deadline=None)
@given(
    st.floats(0.0, 1.0),
    st.floats(0.0, 1.5),
    st.floats(1.2, 3.0),
    st.floats(0.0, 1.5),
    st.floats(0.0, 0.8),
)
def test_boundary_exponent_matches_measured_M(alpha, beta, p, dq, a):
    q = p + dq
    sp = SpaceParams(p, q, a)
    spec = SymbolSpec.power(alpha, beta)
    for dom in (DISC, BALL2):
        e = boundary_exponent(dom, spec, sp)
        d1, d2 = 1e-4, 1e-5
        m1 = M_quantity(dom, spec, sp, radial_point(dom, d1))
        m2 = M_quantity(dom, spec, sp, radial_point(dom, d2))
        measured = math.log(m1 / m2) / math.log(d1 / d2)
        assert measured == pytest.approx(e, abs=0.02)


def test_criteria_decisions():
    sp = SpaceParams(2.0, 2.0, 0.0)
    assert boundedness_criterion(DISC, SymbolSpec.power(0.0, 0.5), sp)["bounded"]
    assert compactness_criterion(DISC, SymbolSpec.power(0.0, 0.5), sp)["compact"]
    c = boundedness_criterion(DISC, SymbolSpec.power(0.0, 0.0), sp)
    assert c["bounded"] and c["critical"]
    # p < q with alpha = beta = 0: e = (n+1)(1/q - 1/p) < 0, unbounded
    sp2 = SpaceParams(2.0, 4.0, 0.0)
    c2 = boundedness_criterion(DISC, SymbolSpec.power(0.0, 0.0), sp2)
    assert not c2["bounded"]
    assert c2["sup_M"] == math.inf
    sw = M_sweep(DISC, SymbolSpec.power(0.0, 1.0), sp)
    assert sw["boundary_exponent"] == pytest.approx(1.0)
    assert sw["limsup_estimate"] == 0.0
    assert np.all(sw["values"] > 0)


# ---------------------------------------------------------------------------
# Radial Galerkin oracle and Nystrom spectra (dual routes, never collapsed)
# ---------------------------------------------------------------------------


def test_galerkin_eigs_closed_form():
    # psi = d: lambda_k = 2(k+1) int (1-r) r^(2k+1) dr = 1/(2k+3)
    lam = galerkin_radial_eigs(DISC, 20, SymbolSpec.power(0.0, 1.0))
    expected = 1.0 / (2.0 * np.arange(21) + 3.0)
    assert np.max(np.abs(lam - expected)) < 1e-14
    # psi = 1: the projection, lambda_k = 1
    lam1 = galerkin_radial_eigs(DISC, 20, SymbolSpec.power(0.0, 0.0))
    assert np.max(np.abs(lam1 - 1.0)) < 1e-12


def test_oracle_singular_values_frozen():
    sig = oracle_singular_values(DISC, 10, SymbolSpec.power(0.0, 1.0)).sigma
    assert sig[0] == pytest.approx(math.sqrt(1.0 / 6.0), rel=1e-13)
    assert sig[1] == pytest.approx(math.sqrt(1.0 / 15.0), rel=1e-13)


def test_nystrom_matches_oracle(grid60):
    # the dual-route check: quadrature collocation against the exact
    # diagonalization, two independent computations of the same spectrum
    spec = SymbolSpec.power(0.0, 1.0)
    opD = assemble_nystrom(DISC, grid60, spec)
    sig = singular_values(opD).sigma
    oracle = oracle_singular_values(DISC, 40, spec).sigma
    # collocation error on sigma_k grows with k (angular aliasing floor
    # ~ lambda_(k + n_angular)); the leading three are solid at n_angular=64
    assert np.max(np.abs(sig[:3] - oracle[:3])) < 1e-3
    assert np.max(np.abs(sig[:8] - oracle[:8])) < 5e-3


def test_singular_spectrum_invariants():
    sp_ = SingularSpectrum(sigma=np.array([0.1, 0.5, 0.3]), a=0.0)
    assert np.all(np.diff(sp_.sigma) <= 0)
    sums = sp_.power_sums(2.0)
    assert sums == sorted(sums)
    with pytest.raises(ValueError):
        SingularSpectrum(sigma=np.array([-1.0]), a=0.0)


def test_node_cap_enforced():
    g = build_grid(DISC, 100, 64, 2.0, 1e-6)
    with pytest.raises(ConfigurationError, match="cap"):
        assemble_nystrom(DISC, g, SymbolSpec.power(0.0, 1.0))


def test_leading_singular_values_match_dense(grid60):
    spec = SymbolSpec.power(0.0, 1.0)
    dense = singular_values(assemble_nystrom(DISC, grid60, spec)).sigma
    lead = leading_singular_values(DISC, grid60, spec, k=4)
    assert np.max(np.abs(lead - dense[:4])) < 1e-10


# ---------------------------------------------------------------------------
# Applying the operator and norm brackets
# ---------------------------------------------------------------------------


def test_apply_toeplitz_projection_fixes_kernels(grid60):
    # T_1 is the Bergman projection: it fixes K(., z); compare on rows the
    # grid can resolve
    d_safe = resolution_distance(grid60)
    mask = grid60.dist >= d_safe
    # f(w) = K(w, z) is the conjugate of the kernel row K(z, w)
    kz = np.conj(kernel_row(DISC, radial_point(DISC, 0.3), grid60.nodes))
    out = apply_toeplitz(DISC, grid60, SymbolSpec.power(0.0, 0.0), kz, mask)
    rel = np.abs(out - kz) / np.abs(kz)
    # the resolution heuristic targets ~1e-3 error right at the mask edge;
    # deeper inside the error decays like exp(-n_angular * d)
    assert np.max(rel[mask]) < 2e-3
    assert np.max(rel[grid60.dist >= 0.25]) < 1e-5
    assert np.all(out[~mask] == 0.0)


def test_disc_l2_norm_exact():
    # ||P|| = 1 and ||T_d|| = sqrt(sup_k lambda_k(d^2)) = sqrt(1/6)
    assert disc_l2_norm(SymbolSpec.power(0.0, 0.0)) == pytest.approx(1.0, rel=1e-9)
    assert disc_l2_norm(SymbolSpec.power(0.0, 1.0)) == pytest.approx(
        math.sqrt(1.0 / 6.0), rel=1e-10
    )


def test_op_norm_bracket_projection(grid60):
    out = op_norm(DISC, grid60, SymbolSpec.power(0.0, 0.0), SpaceParams(2, 2, 0))
    assert out["lower"] == pytest.approx(1.0, abs=1e-6)
    assert out["upper"] == pytest.approx(1.0, abs=1e-6)


def test_op_norm_bracket_generic(grid60):
    # weighted / p != q cases: lower bound must not exceed the upper bound
    for sp in (SpaceParams(2, 2, 0.5), SpaceParams(1.5, 2.5, 0.0)):
        out = op_norm(DISC, grid60, SymbolSpec.power(0.0, 1.0), sp)
        assert 0 < out["lower"] <= out["upper"] < np.inf


def test_op_norm_lower_batch_consistent(grid60):
    spec = SymbolSpec.power(0.0, 1.0)
    sps = [SpaceParams(2, 2, 0.0), SpaceParams(2, 2, 0.5)]
    lows = op_norm_lower_batch(DISC, grid60, spec, sps, seed=1)
    assert len(lows) == 2
    for lo, sp in zip(lows, sps):
        single = op_norm(DISC, grid60, spec, sp, seed=1)
        assert lo <= single["upper"] * (1.0 + 1e-9)
        assert lo > 0


def test_global_bound_check(grid60):
    out = global_bound_check(DISC, grid60, SymbolSpec.power(0.0, 1.0),
                             SpaceParams(2, 2, 0.0))
    assert out["measured_lower"] <= out["theorem_rhs"]
    assert 0 < out["ratio"] <= 1.0
    with pytest.raises(AdmissibilityError):
        global_bound_check(DISC, grid60, SymbolSpec.power(0.0, 0.0),
                           SpaceParams(2, 4, 0.0))


# ---------------------------------------------------------------------------
# Exhaustions and essential norm
# ---------------------------------------------------------------------------


def test_exhaustion_spec():
    ex = ExhaustionSpec.parse("2^-m:2..9")
    assert ex.levels[0] == 0.25
    assert ex.levels[-1] == 2.0**-9
    assert all(b < a for a, b in zip(ex.levels, ex.levels[1:]))
    with pytest.raises(ConfigurationError):
        ExhaustionSpec.parse("junk")
    with pytest.raises(ConfigurationError):
        ExhaustionSpec((0.1, 0.2))  # not decreasing


def test_essential_norm_projection(grid60):
    # P is unit distance from the compacts: both proxies near 1
    en = essential_norm(DISC, grid60, SymbolSpec.power(0.0, 0.0),
                        SpaceParams(2, 2, 0))
    assert en["upper_proxy"] == pytest.approx(1.0, abs=1e-6)
    assert en["lower_proxy"] == pytest.approx(1.0, abs=1e-6)
    assert en["limsup_M"] == 1.0
    with pytest.raises(AdmissibilityError):
        essential_norm(DISC, grid60, SymbolSpec.power(0.0, 0.0),
                       SpaceParams(2, 4, 0))


def test_essential_norm_compact_symbol(grid60):
    en = essential_norm(DISC, grid60, SymbolSpec.power(0.0, 1.0),
                        SpaceParams(2, 2, 0))
    tails = en["tail_norms"]
    assert all(b < a for a, b in zip(tails, tails[1:]))
    assert en["upper_proxy"] < 0.01
    assert en["limsup_M"] == 0.0


# ---------------------------------------------------------------------------
# Berezin, Schatten, trace
# ---------------------------------------------------------------------------


def test_berezin_center_oracle(grid60):
    # (alpha, beta) = (0, 1): T~(0) = 2 int_0^1 (1-r) r dr = 1/3
    val = berezin(DISC, grid60, SymbolSpec.power(0.0, 1.0), radial_point(DISC, 1.0))
    assert val == pytest.approx(1.0 / 3.0, abs=1e-6)
    # projection symbol: T~ = 1 everywhere it is resolved
    val1 = berezin(DISC, grid60, SymbolSpec.power(0.0, 0.0), radial_point(DISC, 0.5))
    assert val1 == pytest.approx(1.0, abs=1e-8)


def test_schatten_criterion_threshold():
    # disc: in S_s iff s(2 alpha + beta) > 1
    assert schatten_criterion(DISC, SymbolSpec.power(0.0, 1.0), 2.0)["in_class"]
    assert not schatten_criterion(DISC, SymbolSpec.power(0.0, 1.0), 0.9)["in_class"]
    crit = schatten_criterion(DISC, SymbolSpec.power(0.0, 1.0), 1.0)
    assert crit["critical"]
    assert schatten_criterion(DISC, SymbolSpec.power(0.0, 1.0), 0.5)["sufficient_only"]
    with pytest.raises(AdmissibilityError):
        schatten_criterion(DISC, SymbolSpec.power(0.0, 1.0), 0.0)


def test_schatten_estimate_synthetic_spectra():
    # sigma_k = (k+1)^(-t) with known t: verdict must match s*t vs 1
    def spectrum(t, n):
        return SingularSpectrum(sigma=(np.arange(n) + 1.0) ** -t, a=0.0)

    spectra = [spectrum(1.5, 400), spectrum(1.5, 800)]
    assert schatten_norm_estimate(spectra, 1.0)["verdict"] == "converging"
    assert schatten_norm_estimate(spectra, 0.5)["verdict"] == "diverging"
    single = schatten_norm_estimate([spectrum(1.5, 400)], 1.0)
    assert single["verdict"] == "inconclusive"
    # disagreeing resolutions are flagged, not guessed
    mixed = [spectrum(1.5, 400), spectrum(2.5, 800)]
    assert schatten_norm_estimate(mixed, 1.0)["verdict"] == "inconclusive"


def test_trace_identity(grid60):
    # (alpha, beta) = (0, 2): trace = 2 int r (1-r)^2 / (1-r^2)^2 ... reduces
    # to 2 ln 2 - 1 on both routes
    out = trace_identity_check(DISC, grid60, SymbolSpec.power(0.0, 2.0))
    target = 2.0 * math.log(2.0) - 1.0
    assert out["lhs"] == pytest.approx(target, rel=1e-6)
    assert out["rhs"] == pytest.approx(target, rel=1e-6)
    assert out["rel_diff"] < 1e-6
    with pytest.raises(AdmissibilityError):
        trace_identity_check(DISC, grid60, SymbolSpec.power(0.0, 0.5))
