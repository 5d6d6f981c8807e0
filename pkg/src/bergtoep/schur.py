"""Schur-test apparatus for the weighted L^p_a -> L^q_a norm bound.

The test weights are powers of the boundary distance and the kernel
diagonal,

    g(z) = d(z)^(-gamma),  h1(w) = d(w)^(-gamma),
    h2(w) = K(w,w)^(1/p - 1/q) d(w)^(a/q - gamma),

with gamma picked from the open window

    max{0, a/q} < gamma < min{1/p', (a+1)/q},

default gamma0 = (1+a)/(p'+q). The two test inequalities reduce to kernel
integral estimates with factors

    tau1(gamma) = 1 / (gamma p' (1 - gamma p'))
    tau2(gamma) = (2q/p - 1) / ((2q/p - 2 - a + gamma q)(a - gamma q + 1))

and at gamma0 the product tau1^(1/p') tau2^(1/q) is controlled by 4 times
the explicit norm-bound factor ((p'+q)/((1+a)(1-ap'/q)))^(1/p'+1/q).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domains import (
    DomainModel,
    boundary_distance,
    kernel_diag,
    kernel_diag_values,
    kernel_row,
    radial_point,
)
from .errors import AdmissibilityError, ConfigurationError
from .estimates import EstimateReport, I_ab, default_sweep
from .quadrature import QuadGrid


@dataclass(frozen=True)
class SpaceParams:
    """Exponent triple (p, q, a) with 1 < p <= q < inf and a > -1."""

    p: float
    q: float
    a: float = 0.0

    def __post_init__(self):
        if not (1.0 < self.p <= self.q):
            raise AdmissibilityError(
                f"(p, q) = ({self.p}, {self.q}) violates 1 < p <= q"
            )
        if self.a <= -1.0:
            raise AdmissibilityError(f"a = {self.a} violates a > -1")

    @property
    def p_conj(self) -> float:
        return self.p / (self.p - 1.0)

    @property
    def q_conj(self) -> float:
        return self.q / (self.q - 1.0)

    @property
    def bounded_admissible(self) -> bool:
        """Regime of the norm bound: a < q/p'."""
        return self.a < self.q / self.p_conj

    @property
    def necessity_admissible(self) -> bool:
        """Regime of the necessity direction: a < min{2(p-1), q-1}."""
        return self.a < min(2.0 * (self.p - 1.0), self.q - 1.0)

    @property
    def fully_admissible(self) -> bool:
        """a < min{2(p-1), q/p'}, the hypothesis of the main theorem."""
        return self.a < min(2.0 * (self.p - 1.0), self.q / self.p_conj)

    def require_bounded_regime(self) -> None:
        if not self.bounded_admissible:
            raise AdmissibilityError(
                f"a = {self.a} violates a < q/p' = {self.q / self.p_conj}"
            )


def gamma_window(sp: SpaceParams) -> tuple[float, float]:
    """Open admissibility interval for the Schur exponent gamma."""
    sp.require_bounded_regime()
    lo = max(0.0, sp.a / sp.q)
    hi = min(1.0 / sp.p_conj, (sp.a + 1.0) / sp.q)
    if not lo < hi:
        raise AdmissibilityError(
            f"empty gamma window ({lo}, {hi}) for (p, q, a) = "
            f"({sp.p}, {sp.q}, {sp.a})"
        )
    return (lo, hi)


def gamma_default(sp: SpaceParams) -> float:
    """gamma0 = (1+a)/(p'+q); always interior to the window when admissible."""
    g0 = (1.0 + sp.a) / (sp.p_conj + sp.q)
    lo, hi = gamma_window(sp)
    if not lo < g0 < hi:
        raise AdmissibilityError(
            f"gamma0 = {g0} fell outside the window ({lo}, {hi})"
        )
    return g0


def _require_gamma(sp: SpaceParams, gamma: float) -> None:
    lo, hi = gamma_window(sp)
    if not lo < gamma < hi:
        raise AdmissibilityError(
            f"gamma = {gamma} outside the open window ({lo}, {hi})"
        )


def tau1(sp: SpaceParams, gamma: float) -> float:
    _require_gamma(sp, gamma)
    gp = gamma * sp.p_conj
    return 1.0 / (gp * (1.0 - gp))


def tau2(sp: SpaceParams, gamma: float) -> float:
    _require_gamma(sp, gamma)
    r = 2.0 * sp.q / sp.p
    return (r - 1.0) / ((r - 2.0 - sp.a + gamma * sp.q) * (sp.a - gamma * sp.q + 1.0))


def schur_weights(sp: SpaceParams, gamma: float, domain: DomainModel, w) -> dict:
    """Point values of the test weights g, h1, h2 at w."""
    _require_gamma(sp, gamma)
    d = boundary_distance(domain, w)
    g = d ** (-gamma)
    k_exp = 1.0 / sp.p - 1.0 / sp.q
    h2 = kernel_diag(domain, w) ** k_exp * d ** (sp.a / sp.q - gamma)
    return {"g": g, "h1": g, "h2": h2}


def verify_test_inequalities(
    domain: DomainModel,
    grid: QuadGrid,
    sp: SpaceParams,
    gamma: float,
    sweep=None,
) -> tuple[EstimateReport, EstimateReport]:
    """Quadrature check of the two Schur test inequalities over a boundary sweep.

    First: int |K(z,w)| h1(w)^p' dV(w) against tau1(gamma) g(z)^p'.
    Second: int |K(z,w)|^(q/p) g(z)^q dV_a(z) against tau2(gamma) h2(w)^q.
    Ratios fold the unknown universal constants; they should be finite and
    refinement-stable, not equal to 1.
    """
    _require_gamma(sp, gamma)
    sweep = default_sweep() if sweep is None else np.asarray(sweep)
    pc = sp.p_conj

    # |K|^1 d^(-gamma p') window: needs -1 < -gamma p' < 0, i.e. gamma p' < 1.
    b1 = -gamma * pc
    lhs1 = np.array(
        [I_ab(domain, grid, radial_point(domain, d), 1.0, b1) for d in sweep]
    )
    env1 = tau1(sp, gamma) * sweep ** (-gamma * pc)
    rep1 = EstimateReport(
        "schur_first",
        {"p": sp.p, "q": sp.q, "a": sp.a, "gamma": gamma, "domain": domain.name},
        sweep, lhs1, env1, [grid.meta()],
    )

    # |K|^(q/p) d^(a - gamma q) window: a2 = q/p >= 1, -1 < a - gamma q < 2q/p - 2.
    a2 = sp.q / sp.p
    b2 = sp.a - gamma * sp.q
    lhs2 = np.array(
        [I_ab(domain, grid, radial_point(domain, d), a2, b2) for d in sweep]
    )
    kd = np.array([kernel_diag(domain, radial_point(domain, d)) for d in sweep])
    env2 = tau2(sp, gamma) * kd ** (a2 - 1.0) * sweep ** b2
    rep2 = EstimateReport(
        "schur_second",
        {"p": sp.p, "q": sp.q, "a": sp.a, "gamma": gamma, "domain": domain.name},
        sweep, lhs2, env2, [grid.meta()],
    )
    return rep1, rep2


def norm_bound_constant(sp: SpaceParams) -> float:
    """The explicit factor ((p'+q)/((1+a)(1-ap'/q)))^(1/p'+1/q)."""
    sp.require_bounded_regime()
    pc = sp.p_conj
    base = (pc + sp.q) / ((1.0 + sp.a) * (1.0 - sp.a * pc / sp.q))
    return base ** (1.0 / pc + 1.0 / sp.q)


def tau_product_bound(sp: SpaceParams, gamma: float | None = None) -> dict:
    """tau1^(1/p') tau2^(1/q) at gamma0 against 4x the norm-bound factor."""
    g0 = gamma_default(sp)
    if gamma is not None and abs(gamma - g0) > 1e-12:
        raise ConfigurationError(
            f"tau product bound is established at gamma0 = {g0}, got gamma = {gamma}"
        )
    lhs = tau1(sp, g0) ** (1.0 / sp.p_conj) * tau2(sp, g0) ** (1.0 / sp.q)
    rhs = 4.0 * norm_bound_constant(sp)
    return {"lhs": lhs, "rhs": rhs, "ok": bool(lhs <= rhs), "gamma0": g0}


def sweep_report(params_list) -> list[dict]:
    """JSON-ready rows {p, q, a, gamma0, tau1, tau2, bound_factor, inequality_ok}."""
    rows = []
    for sp in params_list:
        g0 = gamma_default(sp)
        tp = tau_product_bound(sp)
        rows.append(
            {
                "p": sp.p,
                "q": sp.q,
                "a": sp.a,
                "gamma0": g0,
                "tau1": tau1(sp, g0),
                "tau2": tau2(sp, g0),
                "bound_factor": norm_bound_constant(sp),
                "inequality_ok": tp["ok"],
            }
        )
    return rows
