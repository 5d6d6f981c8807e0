"""Boundary-graded quadrature grids on the model domains.

Grids are tensor products of a graded Gauss-Legendre radial rule with
periodic trapezoid rules in each angular variable (plus a Gauss-Legendre
simplex rule for the ball's torus-sphere coordinates). The radial map
r = 1 - (1 - u)^kappa concentrates nodes at the boundary; kappa = 1 is the
plain rule.

Weights are plain Lebesgue weights. Distance-power weights d(w)^a are applied
at integration time, never baked into the grid, so one grid serves every
weight exponent a simultaneously.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

from .domains import DomainModel
from .errors import AdmissibilityError, ConfigurationError


@dataclass(frozen=True)
class QuadGrid:
    domain: DomainModel
    nodes: np.ndarray     # (m, n) complex
    weights: np.ndarray   # (m,) plain Lebesgue weights
    dist: np.ndarray      # (m,) boundary distances, cached
    n_radial: int
    n_angular: int
    grading: float
    eps_min: float
    volume_error: float   # |sum(weights) - Vol|, the grid's self-reported tolerance

    @property
    def node_count(self) -> int:
        return self.nodes.shape[0]

    def meta(self) -> dict:
        return {
            "domain": self.domain.name,
            "n_radial": self.n_radial,
            "n_angular": self.n_angular,
            "grading": self.grading,
            "eps_min": self.eps_min,
            "nodes": self.node_count,
        }


def _radial_rule(n_radial: int, grading: float, eps_min: float):
    u, wu = roots_legendre(n_radial)
    u = 0.5 * (u + 1.0)
    wu = 0.5 * wu
    r = 1.0 - (1.0 - u) ** grading
    jac = grading * (1.0 - u) ** (grading - 1.0)
    r = np.minimum(r, 1.0 - eps_min)
    return r, wu * jac


def build_grid(
    domain: DomainModel,
    n_radial: int,
    n_angular: int,
    grading: float = 1.0,
    eps_min: float = 1e-6,
    n_simplex: int | None = None,
) -> QuadGrid:
    """Tensor polar grid on the disc or ball.

    n_angular is the trapezoid point count per angular dimension; n_simplex
    (ball only) is the Gauss-Legendre count per simplex coordinate of the
    torus-sphere parametrization, default n_angular // 2.
    """
    if n_radial < 4 or n_angular < 4:
        raise ConfigurationError("need n_radial >= 4 and n_angular >= 4")
    if grading < 1.0:
        raise ConfigurationError("grading exponent must be >= 1")
    if not (0.0 < eps_min < 0.1):
        raise ConfigurationError("eps_min must lie in (0, 0.1)")

    n = domain.dim
    r, wr = _radial_rule(n_radial, grading, eps_min)
    theta = 2.0 * np.pi * np.arange(n_angular) / n_angular
    wtheta = 2.0 * np.pi / n_angular

    if n == 1:
        # dV = r dr dtheta
        nodes = (r[:, None] * np.exp(1j * theta)[None, :]).reshape(-1, 1)
        weights = (wr * r)[:, None].repeat(n_angular, axis=1).reshape(-1) * wtheta
    else:
        # z = r * zeta, zeta on the unit sphere S^(2n-1) in torus-simplex
        # coordinates zeta_j = sqrt(t_j) e^(i theta_j), sum t_j = 1:
        # dV = r^(2n-1) dr * 2^(1-n) dt dtheta.
        ns = n_simplex if n_simplex is not None else max(4, n_angular // 2)
        s, ws = roots_legendre(ns)
        s = 0.5 * (s + 1.0)
        ws = 0.5 * ws
        if n == 2:
            t = np.stack([1.0 - s, s], axis=1)           # (ns, 2)
            wt = ws
        else:
            # Duffy map of the square onto the 2-simplex.
            s1, s2 = np.meshgrid(s, s, indexing="ij")
            t1 = s1.ravel()
            t2 = ((1.0 - s1) * s2).ravel()
            t = np.stack([t1, t2, 1.0 - t1 - t2], axis=1)
            wt = (np.outer(ws, ws) * (1.0 - s1)).ravel()

        angle_grids = np.meshgrid(*([theta] * n), indexing="ij")
        phases = np.exp(1j * np.stack([g.ravel() for g in angle_grids], axis=1))
        sphere = np.sqrt(t)[:, None, :] * phases[None, :, :]   # (nt, na^n, n)
        sphere = sphere.reshape(-1, n)
        wsphere = (2.0 ** (1 - n)) * np.repeat(wt, phases.shape[0]) * wtheta ** n

        nodes = (r[:, None, None] * sphere[None, :, :]).reshape(-1, n)
        radial_w = wr * r ** (2 * n - 1)
        weights = (radial_w[:, None] * wsphere[None, :]).reshape(-1)

    dist = 1.0 - np.linalg.norm(nodes, axis=1)
    vol_err = abs(float(weights.sum()) - domain.volume)
    return QuadGrid(
        domain=domain,
        nodes=nodes,
        weights=weights,
        dist=dist,
        n_radial=n_radial,
        n_angular=n_angular,
        grading=grading,
        eps_min=eps_min,
        volume_error=vol_err,
    )


def _check_weight_exponent(a: float):
    if a <= -1.0:
        raise AdmissibilityError(f"weight exponent a = {a} violates a > -1")


def integrate(grid: QuadGrid, values: np.ndarray, a: float = 0.0) -> complex:
    """sum_i values_i d(node_i)^a weight_i, approximating the dV_a integral."""
    _check_weight_exponent(a)
    values = np.asarray(values)
    if values.shape[0] != grid.node_count:
        raise ConfigurationError("values not sampled on this grid")
    if a == 0.0:
        total = np.sum(values * grid.weights)
    else:
        total = np.sum(values * grid.dist**a * grid.weights)
    return complex(total)


def norm_pa(grid: QuadGrid, values: np.ndarray, p: float, a: float = 0.0) -> float:
    """Weighted p-norm (integral of |f|^p dV_a)^(1/p)."""
    if p < 1.0:
        raise AdmissibilityError(f"p = {p} violates p >= 1")
    total = integrate(grid, np.abs(np.asarray(values)) ** p, a).real
    return float(total) ** (1.0 / p)


def convergence_estimate(domain: DomainModel, integrand, a: float, grids) -> dict:
    """Integral values over a refinement sequence with a Richardson limit.

    ``integrand`` is a callable mapping an (m, n) node array to values.
    Requires at least 3 grids of strictly increasing radial count.
    """
    grids = list(grids)
    if len(grids) < 3:
        raise ConfigurationError("need at least 3 grids")
    counts = [g.n_radial for g in grids]
    if any(b <= a_ for a_, b in zip(counts, counts[1:])):
        raise ConfigurationError("grids must have strictly increasing n_radial")

    values = [complex(integrate(g, integrand(g.nodes), a)) for g in grids]
    d1 = values[-2] - values[-3]
    d2 = values[-1] - values[-2]
    if abs(d2) < 1e-14 or abs(d1) < 1e-14:
        limit, err = values[-1], abs(d2)
    else:
        rho = d2 / d1
        if abs(rho) < 0.95:
            corr = d2 * rho / (1.0 - rho)
            limit = values[-1] + corr
            err = abs(corr) + abs(d2) * 1e-3
        else:
            limit, err = values[-1], abs(d2)
    return {"values": values, "richardson_limit": limit, "error_estimate": float(err)}


GRID_CSV_HEADER_NOTE = "columns: re(z_1),im(z_1),...,re(z_n),im(z_n),weight"


def save_grid_csv(grid: QuadGrid, path) -> None:
    n = grid.domain.dim
    header = []
    for j in range(1, n + 1):
        header += [f"re(z_{j})", f"im(z_{j})"]
    header.append("weight")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for node, w in zip(grid.nodes, grid.weights):
            row = []
            for c in node:
                row += [repr(float(c.real)), repr(float(c.imag))]
            row.append(repr(float(w)))
            writer.writerow(row)


def load_grid_csv(domain: DomainModel, path) -> QuadGrid:
    n = domain.dim
    nodes, weights = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if len(header) != 2 * n + 1:
            raise ConfigurationError(
                f"grid file has {len(header)} columns, expected {2 * n + 1}"
            )
        for row in reader:
            vals = [float(x) for x in row]
            nodes.append([complex(vals[2 * j], vals[2 * j + 1]) for j in range(n)])
            weights.append(vals[-1])
    nodes = np.asarray(nodes, dtype=complex)
    weights = np.asarray(weights)
    dist = 1.0 - np.linalg.norm(nodes, axis=1)
    return QuadGrid(
        domain=domain,
        nodes=nodes,
        weights=weights,
        dist=dist,
        n_radial=0,
        n_angular=0,
        grading=float("nan"),
        eps_min=float(np.min(dist)),
        volume_error=abs(float(weights.sum()) - domain.volume),
    )
