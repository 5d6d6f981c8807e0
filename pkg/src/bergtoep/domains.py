"""Model domains with exact Bergman kernels and their boundary geometry.

The domains are the unit disc in C and the unit balls in C^2, C^3, all with
Lebesgue normalization, so

    K(z, w) = n! / (pi^n (1 - <z, w>)^(n+1)),   <z, w> = sum_i z_i conj(w_i).

Every kernel value can be cross-checked against the truncated orthonormal
monomial series, which collapses (by the multinomial theorem) to

    K(z, w) = sum_{d >= 0} (n+d)! / (pi^n d!) <z, w>^d.

A boundary chart at z is the unitary rotation sending z/|z| to the first
coordinate axis; its holomorphic Jacobian has determinant modulus exactly 1.
On top of the charts sits the near-boundary comparison system: a
pseudo-distance delta(z', w'), companion functions b_j = combinations of
(coefficients / delta)^(1/k), and polydiscs with radii 1/b_j. For the ball
family the coefficients are A_{j2} = 1 for j >= 2 (quadratic order, m = 2),
which reproduces K(z, z) ~ d(z)^(-(n+1)) through prod_j b_j^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ChartDomainError, InvalidPointError

# Interior clamp: operations that evaluate the kernel reject points closer
# to the boundary than this (diagonal overflow control).
INTERIOR_CLAMP = 1e-6

# Radius of the chart ball B(z', c) used for off-diagonal comparisons.
CHART_BALL_RADIUS = 0.5


def _coords(z, dim: int) -> np.ndarray:
    v = np.atleast_1d(np.asarray(z, dtype=complex))
    if v.shape != (dim,):
        raise InvalidPointError(f"expected a point in C^{dim}, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidPointError("point has non-finite coordinates")
    return v


@dataclass(frozen=True)
class DomainModel:
    """Unit disc (dim=1) or unit ball (dim=2, 3) with exact kernel data."""

    kind: str  # "disc" or "ball"
    dim: int
    series_degree: int = 200
    interior_clamp: float = INTERIOR_CLAMP

    def __post_init__(self):
        if self.kind not in ("disc", "ball"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.kind == "disc" and self.dim != 1:
            raise ValueError("disc has dim 1")
        if self.kind == "ball" and self.dim not in (2, 3):
            raise ValueError("ball supported for dim 2, 3")

    @property
    def name(self) -> str:
        return "disc" if self.kind == "disc" else f"ball{self.dim}"

    @property
    def volume(self) -> float:
        # Vol(B_n) = pi^n / n!
        return math.pi ** self.dim / math.factorial(self.dim)

    def point(self, z) -> np.ndarray:
        return _coords(z, self.dim)


DISC = DomainModel("disc", 1)
BALL2 = DomainModel("ball", 2)
BALL3 = DomainModel("ball", 3)

_BY_NAME = {"disc": DISC, "ball2": BALL2, "ball3": BALL3}


def domain_from_name(name: str) -> DomainModel:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise ValueError(f"unknown domain {name!r}; choose from {sorted(_BY_NAME)}")


def boundary_distance(domain: DomainModel, z) -> float:
    """Euclidean distance from z to the unit sphere: 1 - |z|."""
    v = domain.point(z)
    r = float(np.linalg.norm(v))
    if r > 1.0 + 1e-12:
        raise InvalidPointError(f"|z| = {r} > 1: point outside the closed domain")
    return max(1.0 - r, 0.0)


def _require_interior(domain: DomainModel, z) -> np.ndarray:
    v = domain.point(z)
    d = boundary_distance(domain, v)
    if d < domain.interior_clamp:
        raise InvalidPointError(
            f"point with boundary distance {d:.3e} < clamp {domain.interior_clamp:.0e}"
        )
    return v


def kernel(domain: DomainModel, z, w) -> complex:
    """Exact Bergman kernel K(z, w)."""
    zv = _require_interior(domain, z)
    wv = _require_interior(domain, w)
    n = domain.dim
    inner = np.dot(zv, wv.conj())
    return math.factorial(n) / (math.pi ** n) / (1.0 - inner) ** (n + 1)


def kernel_diag(domain: DomainModel, z) -> float:
    """K(z, z) > 0; raises for points at (or numerically on) the boundary."""
    zv = _require_interior(domain, z)
    n = domain.dim
    r2 = float(np.real(np.dot(zv, zv.conj())))
    return math.factorial(n) / (math.pi ** n) / (1.0 - r2) ** (n + 1)


def kernel_series(domain: DomainModel, z, w, degree: int | None = None) -> complex:
    """Truncated orthonormal-series oracle for the kernel.

    Sums (n+d)!/(pi^n d!) <z,w>^d for d = 0..degree. Independent of the
    closed form; used to certify it.
    """
    zv = _require_interior(domain, z)
    wv = _require_interior(domain, w)
    n = domain.dim
    deg = domain.series_degree if degree is None else int(degree)
    x = complex(np.dot(zv, wv.conj()))
    total = 0.0 + 0.0j
    coeff = math.factorial(n) / math.pi ** n  # d = 0 term
    xp = 1.0 + 0.0j
    for d in range(deg + 1):
        total += coeff * xp
        xp *= x
        coeff *= (n + d + 1) / (d + 1)
    return total


def kernel_row(domain: DomainModel, z, nodes: np.ndarray) -> np.ndarray:
    """Vectorized K(z, nodes[i]) for an (m, n) array of interior points."""
    zv = _require_interior(domain, z)
    n = domain.dim
    inner = nodes @ zv.conj()  # <w_i, z>; K(z, w) uses <z, w> = conj of this
    return math.factorial(n) / (math.pi ** n) / (1.0 - inner.conj()) ** (n + 1)


def kernel_diag_values(domain: DomainModel, nodes: np.ndarray) -> np.ndarray:
    """Vectorized K(w, w) for an (m, n) array of interior points."""
    n = domain.dim
    r2 = np.einsum("ij,ij->i", nodes, nodes.conj()).real
    return math.factorial(n) / (math.pi ** n) / (1.0 - r2) ** (n + 1)


# ---------------------------------------------------------------------------
# Boundary charts and the b-function comparison system
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Chart:
    """Unitary rotation chart at a base point.

    ``unitary @ base`` points along the first coordinate axis (real,
    nonnegative). The holomorphic Jacobian of a unitary map has determinant
    modulus 1 exactly, so the chart preserves the kernel and the boundary
    distance.
    """

    base: np.ndarray
    unitary: np.ndarray
    det_modulus: float = 1.0

    def apply(self, pt: np.ndarray) -> np.ndarray:
        return self.unitary @ pt


def chart_at(domain: DomainModel, z) -> Chart:
    zv = domain.point(z)
    n = domain.dim
    r = np.linalg.norm(zv)
    if r < 1e-14:
        U = np.eye(n, dtype=complex)
    else:
        v = zv / r
        # Build a unitary whose first row is conj(v): then (U v)_1 = |v|^2 = 1
        # and the remaining rows span the orthogonal complement.
        cols = [v]
        for k in range(n):
            e = np.zeros(n, dtype=complex)
            e[k] = 1.0
            cols.append(e)
        M = np.stack(cols, axis=1)
        q, _ = np.linalg.qr(M)
        # QR may flip the phase of the first column; undo it.
        phase = np.vdot(q[:, 0], v)
        q[:, 0] *= phase / abs(phase)
        U = q.conj().T
    return Chart(base=zv, unitary=U)


@dataclass(frozen=True)
class BSystem:
    """Quadratic comparison system for the ball family.

    order m = 2; coefficients A_{j2} = 1 for j >= 2, all other A_{jk} = 0.
    """

    domain: DomainModel
    order: int = 2
    chart_radius: float = CHART_BALL_RADIUS

    def coefficient(self, j: int, k: int) -> float:
        """A_{jk} evaluated anywhere in the chart neighbourhood (constant)."""
        if j >= 2 and k == 2:
            return 1.0
        return 0.0


def bsystem_for(domain: DomainModel) -> BSystem:
    return BSystem(domain=domain)


def _chart_coords(bsys: BSystem, z, w, chart: Chart | None):
    dom = bsys.domain
    zv = dom.point(z)
    wv = dom.point(w)
    if boundary_distance(dom, zv) < 0 or boundary_distance(dom, wv) < 0:
        raise InvalidPointError("points must lie in the closed domain")
    ch = chart_at(dom, zv) if chart is None else chart
    zp = ch.apply(zv)
    wp = ch.apply(wv)
    if np.linalg.norm(wp - zp) > bsys.chart_radius + 1e-12:
        raise ChartDomainError(
            f"|w' - z'| = {np.linalg.norm(wp - zp):.4f} exceeds the chart "
            f"neighbourhood radius {bsys.chart_radius}"
        )
    return zp, wp


def pseudo_distance(bsys: BSystem, z, w, chart: Chart | None = None) -> float:
    """delta(z', w') = d(z') + d(w') + |z'_1 - w'_1| + sum A_{ls} |z'_l - w'_l|^s."""
    dom = bsys.domain
    zp, wp = _chart_coords(bsys, z, w, chart)
    d = boundary_distance(dom, zp) + boundary_distance(dom, wp)
    d += abs(zp[0] - wp[0])
    for l in range(2, dom.dim + 1):
        for s in range(2, bsys.order + 1):
            a = bsys.coefficient(l, s)
            if a:
                d += a * abs(zp[l - 1] - wp[l - 1]) ** s
    return float(d)


def b_functions(bsys: BSystem, z, w, chart: Chart | None = None) -> np.ndarray:
    """(b_1, ..., b_n): b_1 = 1/delta, b_j = sum_k (A_{jk}/delta)^(1/k)."""
    dom = bsys.domain
    delta = pseudo_distance(bsys, z, w, chart)
    out = np.empty(dom.dim)
    out[0] = 1.0 / delta
    for j in range(2, dom.dim + 1):
        out[j - 1] = sum(
            (bsys.coefficient(j, k) / delta) ** (1.0 / k)
            for k in range(2, bsys.order + 1)
            if bsys.coefficient(j, k) > 0
        )
    return out


def sharp_b_ratio(domain: DomainModel, bsys: BSystem, z, w) -> dict:
    """Kernel / product-of-b_j^2 comparison ratios at (z, z) and (z, w)."""
    ch = chart_at(domain, domain.point(z))
    b_diag = b_functions(bsys, z, z, ch)
    b_off = b_functions(bsys, z, w, ch)  # raises ChartDomainError out of range
    diag_ratio = kernel_diag(domain, z) / float(np.prod(b_diag**2))
    offdiag_ratio = abs(kernel(domain, z, w)) / float(np.prod(b_off**2))
    return {"diag_ratio": diag_ratio, "offdiag_ratio": offdiag_ratio}


def bpolydisc(bsys: BSystem, z, lam: float, n_phase: int = 8) -> dict:
    """Polydisc P_lam(z') with radii lam / b_j(z', z').

    Reports the exact volume pi^n lam^(2n) prod b_j^(-2), whether sampled
    polydisc points stay inside the domain, and how much the kernel diagonal
    and the boundary distance vary over the contained samples. Containment
    failure is reported in the output, not raised.
    """
    dom = bsys.domain
    n = dom.dim
    zv = dom.point(z)
    ch = chart_at(dom, zv)
    zp = ch.apply(zv)
    b = b_functions(bsys, z, z, ch)
    radii = lam / b
    volume = math.pi ** n * lam ** (2 * n) * float(np.prod(1.0 / b**2))

    phases = np.exp(2j * np.pi * np.arange(n_phase) / n_phase)
    fractions = (0.5, 1.0)
    samples = [zp]
    # Per-coordinate edge samples plus full corners.
    for j in range(n):
        for f in fractions:
            for ph in phases:
                pt = zp.copy()
                pt[j] += f * radii[j] * ph
                samples.append(pt)
    for ph in phases:
        pt = zp + radii * ph
        samples.append(pt)

    Uinv = ch.unitary.conj().T
    contained = True
    kd_vals, dist_vals = [], []
    for pt in samples:
        back = Uinv @ pt
        r = float(np.linalg.norm(back))
        if r >= 1.0:
            contained = False
            continue
        dist_vals.append(1.0 - r)
        if 1.0 - r >= dom.interior_clamp:
            kd_vals.append(kernel_diag(dom, back))
    kd_vals = np.asarray(kd_vals) if kd_vals else np.asarray([np.nan])
    dist_vals = np.asarray(dist_vals) if dist_vals else np.asarray([np.nan])
    return {
        "radii": radii,
        "volume": volume,
        "contained": contained,
        "kernel_variation": float(np.max(kd_vals) / np.min(kd_vals)),
        "distance_variation": float(np.max(dist_vals) / np.min(dist_vals)),
    }


def radial_point(domain: DomainModel, d: float) -> np.ndarray:
    """Point on the positive real first-coordinate ray at boundary distance d."""
    v = np.zeros(domain.dim, dtype=complex)
    v[0] = 1.0 - d
    return v
