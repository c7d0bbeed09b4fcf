"""Bent (annular) waveguide eigenmodes.

The vertical problem is a symmetric slab: cosine (even) and sine (odd) cores
matched to exponential tails, giving tangent/cotangent transcendental
equations for beta_w. The radial problem is a Bessel boundary problem whose
azimuthal number m is a positive real solving a 2x2 determinant condition.
Also exposes the radial-Schrodinger substitution u = sqrt(r) R and the
dimension-dependent inverse-square potential behind it. Lengths in um.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .errors import (
    BesselRange,
    BoundaryResidual,
    DomainError,
    NoRealSolution,
)

__all__ = [
    "BentGuideSpec",
    "BentModeSolution",
    "vertical_roots",
    "count_vertical_modes",
    "radial_determinant",
    "azimuthal_numbers",
    "approximate_azimuthal",
    "assemble_mode",
    "solve_modes",
    "mean_radius",
    "effective_index",
    "robustly_guided",
    "qff_transform_check",
    "qff_potential",
    "integer_snap_residual",
]

AZIMUTHAL_SCAN_STEP = 0.05
Z_TAIL_DECAY_LENGTHS = 5.0
WALL_TOLERANCE = 1e-6


@dataclass(frozen=True)
class BentGuideSpec:
    """Annular cross-section between radii r1 < r2, height 2 z0."""

    inner_radius_um: float
    outer_radius_um: float
    half_height_um: float
    core_index: float
    clad_index: float
    vacuum_wavelength_um: float

    def __post_init__(self):
        if not 0 < self.inner_radius_um < self.outer_radius_um:
            raise DomainError("radii must satisfy 0 < r1 < r2")
        if self.half_height_um <= 0:
            raise DomainError("half height must be positive")
        if not self.core_index > self.clad_index >= 1.0:
            raise DomainError("indices must satisfy n1 > n2 >= 1")
        if self.vacuum_wavelength_um <= 0:
            raise DomainError("wavelength must be positive")

    @property
    def k0_per_um(self) -> float:
        return 2.0 * math.pi / self.vacuum_wavelength_um

    @property
    def contrast_k_per_um(self) -> float:
        """k0 sqrt(n1^2 - n2^2): the upper limit for beta_w."""
        return self.k0_per_um * math.sqrt(self.core_index**2 - self.clad_index**2)


@dataclass(frozen=True)
class VerticalRoot:
    parity: str  # "even" (cosine core) or "odd" (sine core)
    q: int
    beta_w_per_um: float
    beta_s_per_um: float


@dataclass
class BentModeSolution:
    """One assembled E_r mode and its derived characteristics."""

    p: int
    q: int
    parity: str
    beta_w_per_um: float
    beta_s_per_um: float
    h_per_um: float
    m: float
    gamma_rad: float
    spec: BentGuideSpec = field(repr=False)
    n_eff: float = math.nan
    mean_radius_um: float = math.nan
    physical: bool = False

    @property
    def order(self) -> float:
        """Bessel order lambda = sqrt(m^2 + 1)."""
        return math.sqrt(self.m**2 + 1.0)

    def radial_profile(self, r_um) -> np.ndarray:
        """R(r) = sin(gamma) J_lam(h r) + cos(gamma) Y_lam(h r)."""
        r = np.asarray(r_um, dtype=float)
        j, y = numerics.bessel_jy(self.order, self.h_per_um * r)
        return math.sin(self.gamma_rad) * j + math.cos(self.gamma_rad) * y

    def vertical_profile(self, z_um) -> np.ndarray:
        """Z(z): sinusoid in the core, value-matched exponential tails."""
        z = np.asarray(z_um, dtype=float)
        z0 = self.spec.half_height_um
        if self.parity == "even":
            core = np.cos(self.beta_w_per_um * z)
            edge = math.cos(self.beta_w_per_um * z0)
            sign = np.ones_like(z)
        else:
            core = np.sin(self.beta_w_per_um * z)
            edge = math.sin(self.beta_w_per_um * z0)
            sign = np.sign(z)
        tail = sign * edge * np.exp(-self.beta_s_per_um * (np.abs(z) - z0))
        return np.where(np.abs(z) <= z0, core, tail)

    def field(self, r_um, z_um) -> np.ndarray:
        """|E_r| on the outer product of the radial and vertical samples."""
        rad = self.radial_profile(r_um)
        ver = self.vertical_profile(z_um)
        return np.abs(np.atleast_1d(rad)[:, None] * np.atleast_1d(ver)[None, :])


def vertical_roots(spec: BentGuideSpec) -> list[VerticalRoot]:
    """All beta_w roots of the two slab equations, ascending, q = 1, 2, ...

    Cosine (even) cores satisfy tan(beta z0) = gamma/beta and sine (odd)
    cores cot(beta z0) = -gamma/beta, with gamma = sqrt(B^2 - beta^2) the
    cladding decay rate; gamma doubles as beta_s through the index-matching
    condition h^2 = k1^2 - beta_w^2 = k2^2 + beta_s^2.
    """
    cap = spec.contrast_k_per_um
    z0 = spec.half_height_um

    def f_even(beta):
        # beta sin(b z0) - gamma cos(b z0): continuous form of the tan branch
        gamma = math.sqrt(max(cap**2 - beta**2, 0.0))
        return beta * math.sin(beta * z0) - gamma * math.cos(beta * z0)

    def f_odd(beta):
        gamma = math.sqrt(max(cap**2 - beta**2, 0.0))
        return beta * math.cos(beta * z0) + gamma * math.sin(beta * z0)

    n_scan = max(400, int(800 * (cap * z0 / math.pi + 1)))
    grid = np.linspace(cap * 1e-9, cap * (1 - 1e-12), n_scan)
    roots = []
    for parity, f in (("even", f_even), ("odd", f_odd)):
        vals = np.array([f(b) for b in grid])
        sign = np.sign(vals)
        for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
            root = numerics.find_root(
                f, numerics.bracket_root(f, grid[i], grid[i + 1]), tol=1e-14)
            gamma = math.sqrt(max(cap**2 - root**2, 0.0))
            roots.append((parity, root, gamma))
    roots.sort(key=lambda t: t[1])
    return [VerticalRoot(parity, q, beta, gamma)
            for q, (parity, beta, gamma) in enumerate(roots, start=1)]


def count_vertical_modes(spec: BentGuideSpec) -> tuple[int, int]:
    """Estimated root counts (tangent family, cotangent family).

    ceil(l/pi) and ceil(l/pi - 1/2) with l = k0 z0 sqrt(n1^2 - n2^2); the
    totals track the exact counts from vertical_roots.
    """
    ell = spec.contrast_k_per_um * spec.half_height_um
    return (math.ceil(ell / math.pi), math.ceil(ell / math.pi - 0.5))


def radial_determinant(spec: BentGuideSpec, h_per_um: float, m) -> np.ndarray:
    """J_lam(h r1) Y_lam(h r2) - J_lam(h r2) Y_lam(h r1), lam = sqrt(m^2+1)."""
    m = np.asarray(m, dtype=float)
    lam = np.sqrt(m**2 + 1.0)
    if np.any(lam > numerics.MAX_BESSEL_ORDER):
        raise BesselRange(
            f"order sqrt(m^2+1) exceeds {numerics.MAX_BESSEL_ORDER}")
    j1, y1 = numerics.bessel_jy(lam, h_per_um * spec.inner_radius_um)
    j2, y2 = numerics.bessel_jy(lam, h_per_um * spec.outer_radius_um)
    return j1 * y2 - j2 * y1


def azimuthal_numbers(spec: BentGuideSpec, h_per_um: float) -> list[tuple[int, float, float]]:
    """All (p, m, gamma) roots of the radial determinant, m descending.

    Scanned with a 0.05 bracketing step over m in (0, h r2], refined with the
    Brent solver; gamma solves sin(gamma) J_lam(h r1) + cos(gamma) Y_lam(h r1)
    = 0, i.e. tan(gamma) = -Y_lam(h r1) / J_lam(h r1).
    """
    if h_per_um <= 0:
        raise DomainError("h must be positive")
    m_hi = h_per_um * spec.outer_radius_um
    lam_hi = math.sqrt(m_hi**2 + 1.0)
    if lam_hi > numerics.MAX_BESSEL_ORDER:
        raise BesselRange(
            f"scan upper order {lam_hi:.1f} exceeds {numerics.MAX_BESSEL_ORDER}")
    grid = np.arange(AZIMUTHAL_SCAN_STEP, m_hi + AZIMUTHAL_SCAN_STEP,
                     AZIMUTHAL_SCAN_STEP)
    grid = grid[grid <= m_hi]
    vals = radial_determinant(spec, h_per_um, grid)
    sign = np.sign(vals)
    ms = []
    for i in np.nonzero(sign[:-1] * sign[1:] < 0)[0]:
        f = lambda m: float(radial_determinant(spec, h_per_um, m))
        root = numerics.find_root(
            f, numerics.bracket_root(f, grid[i], grid[i + 1]), tol=1e-13)
        ms.append(root)
    ms.sort(reverse=True)
    out = []
    for p, m in enumerate(ms, start=1):
        lam = math.sqrt(m**2 + 1.0)
        j1, y1 = numerics.bessel_jy(lam, h_per_um * spec.inner_radius_um)
        gamma = math.atan2(-y1, j1)
        out.append((p, m, gamma))
    return out


def approximate_azimuthal(spec: BentGuideSpec, h_per_um: float, p: int) -> float:
    """Thin-annulus estimate m = r_av sqrt(h^2 - pi^2 p^2/dr^2 - 5/(4 r_av^2))."""
    if p < 1:
        raise DomainError("p must be >= 1")
    r_av = 0.5 * (spec.inner_radius_um + spec.outer_radius_um)
    dr = spec.outer_radius_um - spec.inner_radius_um
    radicand = h_per_um**2 - (math.pi * p / dr) ** 2 - 1.25 / r_av**2
    if radicand <= 0:
        raise NoRealSolution(f"no real azimuthal number for p={p}")
    return r_av * math.sqrt(radicand)


def assemble_mode(spec: BentGuideSpec, vert: VerticalRoot,
                  azim: tuple[int, float, float]) -> BentModeSolution:
    """Combine a vertical root and an azimuthal root into a full mode.

    Checks that the radial profile vanishes at both walls relative to its
    peak before accepting the combination.
    """
    p, m, gamma = azim
    k1 = spec.k0_per_um * spec.core_index
    h = math.sqrt(k1**2 - vert.beta_w_per_um**2)
    mode = BentModeSolution(
        p=p, q=vert.q, parity=vert.parity,
        beta_w_per_um=vert.beta_w_per_um, beta_s_per_um=vert.beta_s_per_um,
        h_per_um=h, m=m, gamma_rad=gamma, spec=spec)
    r = np.linspace(spec.inner_radius_um, spec.outer_radius_um, 512)
    prof = mode.radial_profile(r)
    peak = float(np.max(np.abs(prof)))
    worst = max(abs(prof[0]), abs(prof[-1]))
    if peak == 0 or worst / peak > WALL_TOLERANCE:
        raise BoundaryResidual(
            f"radial profile leaks at the walls: {worst / peak:.2e}")
    mode.mean_radius_um = mean_radius(mode)
    mode.n_eff = effective_index(mode)
    return mode


def _worker_count() -> int:
    env = os.environ.get("WORKBENCH_THREADS", "1")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def solve_modes(spec: BentGuideSpec) -> list[BentModeSolution]:
    """Full mode table ordered by (q ascending, p ascending)."""
    verts = vertical_roots(spec)
    k1 = spec.k0_per_um * spec.core_index

    def modes_for(vert: VerticalRoot) -> list[BentModeSolution]:
        h = math.sqrt(k1**2 - vert.beta_w_per_um**2)
        return [assemble_mode(spec, vert, azim)
                for azim in azimuthal_numbers(spec, h)]

    workers = _worker_count()
    if workers > 1 and len(verts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            groups = list(pool.map(modes_for, verts))
    else:
        groups = [modes_for(v) for v in verts]
    return [mode for group in groups for mode in group]


def mean_radius(mode: BentModeSolution) -> float:
    """Intensity-weighted radial position <r> of the assembled field, um.

    Integrates |E_r|^2 over the annulus and over z out to 5 vertical decay
    lengths beyond the walls.
    """
    spec = mode.spec
    z_max = spec.half_height_um + Z_TAIL_DECAY_LENGTHS / mode.beta_s_per_um
    r_num = numerics.integrate(
        lambda r: mode.radial_profile(r)**2 * r,
        spec.inner_radius_um, spec.outer_radius_um, order=96)
    r_den = numerics.integrate(
        lambda r: mode.radial_profile(r)**2,
        spec.inner_radius_um, spec.outer_radius_um, order=96)
    z_mass = numerics.integrate(
        lambda z: mode.vertical_profile(z)**2, -z_max, z_max, order=96)
    return (r_num * z_mass) / (r_den * z_mass)


def effective_index(mode: BentModeSolution) -> float:
    """n_eff = m / (k0 <r>); also refreshes the physical flag."""
    if math.isnan(mode.mean_radius_um):
        mode.mean_radius_um = mean_radius(mode)
    n_eff = mode.m / (mode.spec.k0_per_um * mode.mean_radius_um)
    mode.physical = bool(n_eff > mode.spec.clad_index)
    return n_eff


def robustly_guided(mode: BentModeSolution, margin: float = 0.05) -> bool:
    """Guidance with a safety band: n_eff must clear n2 by `margin`.

    The strict flag (mode.physical) uses n_eff > n2; modes inside the band
    are marginal and tend to disappear in finite-element cross-checks.
    """
    if margin < 0:
        raise DomainError("margin must be nonnegative")
    return mode.n_eff > mode.spec.clad_index + margin


def qff_transform_check(mode: BentModeSolution, n_samples: int = 2001) -> dict:
    """Residual of the radial-Schrodinger form on u(r) = sqrt(r) R(r).

    u must satisfy u'' - (lam^2 - 1/4) u / r^2 + h^2 u = 0; the second
    derivative is taken with a 5-point central stencil on a uniform interior
    grid, skipping 2 steps at each wall.
    """
    spec = mode.spec
    r = np.linspace(spec.inner_radius_um, spec.outer_radius_um, n_samples)
    dr = r[1] - r[0]
    u = np.sqrt(r) * mode.radial_profile(r)
    upp = np.full_like(u, np.nan)
    upp[2:-2] = (-u[4:] + 16 * u[3:-1] - 30 * u[2:-2]
                 + 16 * u[1:-3] - u[:-4]) / (12.0 * dr**2)
    lam2 = mode.m**2 + 1.0
    interior = slice(2, -2)
    resid = (upp[interior] - (lam2 - 0.25) * u[interior] / r[interior]**2
             + mode.h_per_um**2 * u[interior])
    scale = mode.h_per_um**2 * float(np.max(np.abs(u)))
    max_rel = float(np.max(np.abs(resid))) / scale
    return {"max_relative_residual": max_rel, "scale": scale,
            "n_interior": int(u.size - 4)}


def qff_potential(m: float, r_um, dimension: int = 2) -> np.ndarray:
    """Radial effective potential (m^2 + (d-1)(d-3)/4) / r^2, units of 2M/hbar^2.

    The dimension-dependent term vanishes for d = 1 and d = 3; in d = 2 it is
    the attractive -1/(4 r^2) anticentrifugal contribution.
    """
    if dimension < 1:
        raise DomainError("dimension must be >= 1")
    r = np.asarray(r_um, dtype=float)
    if np.any(r <= 0):
        raise DomainError("potential defined for r > 0")
    d = dimension
    out = (m**2 + (d - 1) * (d - 3) / 4.0) / r**2
    return float(out) if out.ndim == 0 else out


def integer_snap_residual(spec: BentGuideSpec, h_per_um: float, m: float) -> tuple[int, float]:
    """Nearest-integer azimuthal number and the determinant residual there.

    Reported for comparison with finite-element solvers that require integer
    m; the residual is relative to the local determinant scale.
    """
    m_int = max(1, round(m))
    det = float(radial_determinant(spec, h_per_um, m_int))
    span = np.linspace(max(m_int - 0.5, 0.1), m_int + 0.5, 21)
    scale = float(np.max(np.abs(radial_determinant(spec, h_per_um, span))))
    return m_int, det / scale if scale > 0 else math.inf
