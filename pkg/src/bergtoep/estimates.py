"""Kernel integral estimates and their theoretical envelopes.

Each estimate pairs a quadrature value (LHS) with the envelope it should be
comparable to near the boundary:

    I_ab(z)    = int |K(z,w)|^a d(w)^b dV(w)            ~ K(z,z)^(a-1) d(z)^b
    I_abs(z)   = int |K(z,w)|^a d(w)^b K(w,w)^(-s) dV   ~ K(z,z)^(a-s-1) d(z)^b
    ||K(.,z)||_{p,a}                                    ~ K(z,z)^(1-1/p) d(z)^(a/p)
    int |K(z,w)|^2 K(w,w)^(-alpha) d(w)^beta dV         ~ K(z,z)^(1-alpha) d(z)^beta

The constants are never asserted; sweep reports record min/max ratios so
stability across refinement can be checked instead. Integrals run over the
whole domain (the local estimates hold globally on the model domains, which
is the stronger check).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .domains import (
    DomainModel,
    boundary_distance,
    kernel_diag,
    kernel_diag_values,
    kernel_row,
    radial_point,
)
from .errors import AdmissibilityError
from .quadrature import QuadGrid, integrate, norm_pa


@dataclass
class EstimateReport:
    """One boundary sweep of an estimate: LHS, envelope, and their ratio."""

    label: str
    params: dict
    d_values: np.ndarray
    lhs: np.ndarray
    envelope: np.ndarray
    grids: list = field(default_factory=list)

    @property
    def ratios(self) -> np.ndarray:
        return self.lhs / self.envelope

    @property
    def min_ratio(self) -> float:
        return float(np.min(self.ratios))

    @property
    def max_ratio(self) -> float:
        return float(np.max(self.ratios))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["d_z", "lhs", "rhs_envelope", "ratio"])
            for d, l, e, r in zip(self.d_values, self.lhs, self.envelope, self.ratios):
                writer.writerow([repr(float(d)), repr(float(l)),
                                 repr(float(e)), repr(float(r))])

    def to_json_dict(self) -> dict:
        return {
            "label": self.label,
            "params": self.params,
            "min_ratio": self.min_ratio,
            "max_ratio": self.max_ratio,
            "grids": self.grids,
            "d_values": [float(x) for x in self.d_values],
            "lhs": [float(x) for x in self.lhs],
            "envelope": [float(x) for x in self.envelope],
        }

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)


def default_sweep(d_max: float = 0.5, d_min: float = 1e-3, ratio: float = 0.5):
    """Geometric boundary-distance schedule d_max, d_max*ratio, ... >= d_min."""
    out = []
    d = d_max
    while d >= d_min * (1.0 - 1e-12):
        out.append(d)
        d *= ratio
    return np.asarray(out)


def _check_iab_window(a: float, b: float) -> None:
    if a < 1.0:
        raise AdmissibilityError(f"a = {a} violates a >= 1")
    if not (-1.0 < b < 2.0 * a - 2.0):
        raise AdmissibilityError(
            f"b = {b} violates -1 < b < 2a-2 = {2.0 * a - 2.0} (at a = {a})"
        )


def _check_iabs_window(a: float, b: float, s: float) -> None:
    if s < 0.0:
        raise AdmissibilityError(f"s = {s} violates s >= 0")
    if a - s < 1.0:
        raise AdmissibilityError(f"a - s = {a - s} violates a - s >= 1")
    if not (-1.0 < b + 2.0 * s < 2.0 * a - 2.0):
        raise AdmissibilityError(
            f"b + 2s = {b + 2.0 * s} violates -1 < b + 2s < 2a-2 = {2.0 * a - 2.0}"
        )


def I_ab(domain: DomainModel, grid: QuadGrid, z, a: float, b: float) -> float:
    """int |K(z,w)|^a d(w)^b dV(w) by quadrature."""
    _check_iab_window(a, b)
    row = np.abs(kernel_row(domain, z, grid.nodes)) ** a
    return integrate(grid, row, b).real


def I_ab_envelope(domain: DomainModel, z, a: float, b: float) -> float:
    return kernel_diag(domain, z) ** (a - 1.0) * boundary_distance(domain, z) ** b


def I_abs(domain: DomainModel, grid: QuadGrid, z, a: float, b: float, s: float) -> float:
    """int |K(z,w)|^a d(w)^b K(w,w)^(-s) dV(w) by quadrature."""
    _check_iabs_window(a, b, s)
    row = np.abs(kernel_row(domain, z, grid.nodes)) ** a
    if s != 0.0:
        row = row * kernel_diag_values(domain, grid.nodes) ** (-s)
    return integrate(grid, row, b).real


def I_abs_envelope(domain: DomainModel, z, a: float, b: float, s: float) -> float:
    return (
        kernel_diag(domain, z) ** (a - s - 1.0) * boundary_distance(domain, z) ** b
    )


def I_ab_report(domain, grid, a, b, sweep=None) -> EstimateReport:
    sweep = default_sweep() if sweep is None else np.asarray(sweep)
    _check_iab_window(a, b)
    lhs = np.array([I_ab(domain, grid, radial_point(domain, d), a, b) for d in sweep])
    env = np.array([I_ab_envelope(domain, radial_point(domain, d), a, b) for d in sweep])
    return EstimateReport("I_ab", {"a": a, "b": b, "domain": domain.name},
                          sweep, lhs, env, [grid.meta()])


def I_abs_report(domain, grid, a, b, s, sweep=None) -> EstimateReport:
    sweep = default_sweep() if sweep is None else np.asarray(sweep)
    _check_iabs_window(a, b, s)
    lhs = np.array(
        [I_abs(domain, grid, radial_point(domain, d), a, b, s) for d in sweep]
    )
    env = np.array(
        [I_abs_envelope(domain, radial_point(domain, d), a, b, s) for d in sweep]
    )
    return EstimateReport("I_abs", {"a": a, "b": b, "s": s, "domain": domain.name},
                          sweep, lhs, env, [grid.meta()])


def kernel_norm(domain: DomainModel, grid: QuadGrid, z, p: float, a: float) -> float:
    """||K(., z)||_{p,a} by quadrature."""
    if p < 1.0:
        raise AdmissibilityError(f"p = {p} violates p >= 1")
    if a <= -1.0:
        raise AdmissibilityError(f"a = {a} violates a > -1")
    row = kernel_row(domain, z, grid.nodes)
    return norm_pa(grid, row, p, a)


def kernel_norm_envelope(domain: DomainModel, z, p: float, a: float) -> float:
    return (
        kernel_diag(domain, z) ** (1.0 - 1.0 / p)
        * boundary_distance(domain, z) ** (a / p)
    )


def kernel_norm_bracket(domain, grid, p, a, sweep=None) -> EstimateReport:
    """Ratio of ||K(.,z)||_{p,a} to its envelope over a boundary sweep.

    The lower comparison holds for every p >= 1, a > -1; the upper one
    additionally needs a < 2(p-1), which is recorded in params rather than
    enforced (inadmissible points simply show a growing ratio).
    """
    sweep = default_sweep() if sweep is None else np.asarray(sweep)
    lhs = np.array(
        [kernel_norm(domain, grid, radial_point(domain, d), p, a) for d in sweep]
    )
    env = np.array(
        [kernel_norm_envelope(domain, radial_point(domain, d), p, a) for d in sweep]
    )
    params = {
        "p": p,
        "a": a,
        "domain": domain.name,
        "upper_admissible": bool(a < 2.0 * (p - 1.0)),
    }
    return EstimateReport("kernel_norm", params, sweep, lhs, env, [grid.meta()])


def berezin_envelope_lhs(domain, grid, z, alpha: float, beta: float) -> float:
    """int |K(z,w)|^2 K(w,w)^(-alpha) d(w)^beta dV(w)."""
    row = np.abs(kernel_row(domain, z, grid.nodes)) ** 2
    if alpha != 0.0:
        row = row * kernel_diag_values(domain, grid.nodes) ** (-alpha)
    return integrate(grid, row, beta).real


def berezin_envelope_ratio(domain, grid, alpha, beta, sweep=None) -> EstimateReport:
    """Ratio of the weighted kernel-square integral to K(z,z)^(1-alpha) d(z)^beta."""
    if alpha < 0.0 or beta < 0.0:
        raise AdmissibilityError(f"need alpha, beta >= 0, got ({alpha}, {beta})")
    if 2.0 * alpha + beta >= 2.0:
        raise AdmissibilityError(
            f"2*alpha + beta = {2.0 * alpha + beta} violates 2*alpha + beta < 2"
        )
    sweep = default_sweep() if sweep is None else np.asarray(sweep)
    lhs = np.array(
        [berezin_envelope_lhs(domain, grid, radial_point(domain, d), alpha, beta) for d in sweep]
    )
    env = np.array(
        [
            kernel_diag(domain, radial_point(domain, d)) ** (1.0 - alpha) * d ** beta
            for d in sweep
        ]
    )
    return EstimateReport(
        "berezin_upper", {"alpha": alpha, "beta": beta, "domain": domain.name},
        sweep, lhs, env, [grid.meta()],
    )
