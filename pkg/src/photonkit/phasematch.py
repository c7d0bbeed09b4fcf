"""Quasi-phase-matching: wavevector mismatch, idler geometry, and the scalar
root solve for the signal wavelength."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .dispersion import (
    CrystalSpec,
    Polarization,
    poling_period,
    refractive_index,
    wavevector_magnitude,
)
from .errors import ArcsineDomain, DomainError, MultipleRoots, NoRootInWindow

__all__ = [
    "PhaseMatchQuery",
    "PhaseMatchSolution",
    "idler_wavelength",
    "grating_vector",
    "mismatch",
    "scalar_mismatch",
    "idler_angle",
    "solve_signal_wavelength",
    "solve_signal_sweep",
    "snell_external_angle",
]

COARSE_STEP_NM = 0.1
MISMATCH_TOL_PER_UM = 1e-10


@dataclass(frozen=True)
class PhaseMatchQuery:
    """One phase-matching question: pump, geometry, polarizations, QPM order.

    Angles are internal to the crystal, in radians. The pump propagates along
    the poling axis (x); signal direction is (theta_vis, phi_vis).
    """

    pump_wavelength_nm: float
    signal_theta_rad: float = 0.0
    signal_phi_rad: float = 0.0
    temperature_k: float = 298.0
    pol_pump: Polarization = Polarization.Z
    pol_signal: Polarization = Polarization.Z
    pol_idler: Polarization = Polarization.Z
    qpm_order: int = 1
    qpm_sign: int = -1

    def __post_init__(self):
        if self.pump_wavelength_nm <= 0:
            raise DomainError("pump wavelength must be positive")
        if abs(self.qpm_sign) != 1:
            raise DomainError("qpm_sign must be +1 or -1")
        if self.qpm_order < 0:
            raise DomainError("qpm_order must be nonnegative")
        for field in ("pol_pump", "pol_signal", "pol_idler"):
            pol = getattr(self, field)
            if not isinstance(pol, Polarization):
                try:
                    pol = Polarization(str(pol).lower())
                except ValueError:
                    raise DomainError(f"unknown polarization {pol!r}") from None
                object.__setattr__(self, field, pol)


@dataclass(frozen=True)
class PhaseMatchSolution:
    signal_wavelength_nm: float
    idler_wavelength_nm: float
    idler_angle_rad: float
    mismatch_per_um: float


def idler_wavelength(pump_nm: float, signal_nm: float) -> float:
    """Energy conservation: 1/lam_i = 1/lam_p - 1/lam_s."""
    if not 0 < pump_nm < signal_nm:
        raise DomainError("requires 0 < pump wavelength < signal wavelength")
    return 1.0 / (1.0 / pump_nm - 1.0 / signal_nm)


def grating_vector(query: PhaseMatchQuery, crystal: CrystalSpec) -> float:
    """Signed quasi-wavevector contribution sign * m * 2 pi / Lambda(T), 1/um.

    Enters the mismatch as dk = k_p - k_s - k_i + grating_vector, so the
    default sign of -1 gives the subtracted-grating convention.
    """
    if crystal.poling_period_um == 0 or query.qpm_order == 0:
        return 0.0
    lam_t = poling_period(crystal, query.temperature_k)
    return query.qpm_sign * query.qpm_order * 2.0 * math.pi / lam_t


def _wave_ks(query: PhaseMatchQuery, signal_nm, crystal: CrystalSpec):
    """Wavevector magnitudes (k_p, k_s, k_i) in 1/um, vectorized over signal_nm."""
    signal_nm = np.asarray(signal_nm, dtype=float)
    pump_um = query.pump_wavelength_nm * 1e-3
    signal_um = signal_nm * 1e-3
    idler_um = 1.0 / (1.0 / pump_um - 1.0 / signal_um)
    k_p = wavevector_magnitude(
        refractive_index(crystal.axis_set(query.pol_pump), pump_um), pump_um)
    k_s = wavevector_magnitude(
        refractive_index(crystal.axis_set(query.pol_signal), signal_um), signal_um)
    k_i = wavevector_magnitude(
        refractive_index(crystal.axis_set(query.pol_idler), idler_um), idler_um)
    return k_p, k_s, k_i


def scalar_mismatch(query: PhaseMatchQuery, signal_nm, crystal: CrystalSpec):
    """Longitudinal mismatch k_p - k_s cos(th_s) - k_i cos(th_i) - q K, 1/um.

    The idler polar angle absorbs the transverse components exactly (the
    idler azimuth is opposite the signal azimuth), so the residual mismatch is
    purely along the propagation axis. Vectorized over signal_nm.
    """
    k_p, k_s, k_i = _wave_ks(query, signal_nm, crystal)
    sin_s = math.sin(query.signal_theta_rad)
    sin_i = k_s * sin_s / k_i
    if np.any(np.abs(sin_i) > 1):
        raise ArcsineDomain("idler cannot absorb the signal transverse momentum")
    cos_i = np.sqrt(1.0 - sin_i**2)
    dk = k_p - k_s * math.cos(query.signal_theta_rad) - k_i * cos_i
    dk = dk + grating_vector(query, crystal)
    return float(dk) if np.ndim(dk) == 0 else dk


def mismatch(query: PhaseMatchQuery, signal_nm: float, crystal: CrystalSpec):
    """Mismatch vector (longitudinal, transverse) in 1/um and its magnitude.

    The transverse component is zero by construction of the idler direction;
    it is returned explicitly so callers see the vector contract.
    """
    dk_long = scalar_mismatch(query, signal_nm, crystal)
    vec = np.array([dk_long, 0.0, 0.0])
    return vec, abs(dk_long)


def idler_angle(query: PhaseMatchQuery, signal_nm: float, crystal: CrystalSpec) -> float:
    """Idler polar angle, valid in the phase-matched regime only.

    theta_i = arcsin(t / sqrt(t^2 + l^2)) with t the signal transverse
    wavevector and l the grating-corrected longitudinal remainder.
    """
    k_p, k_s, k_i = _wave_ks(query, signal_nm, crystal)
    t = k_s * math.sin(query.signal_theta_rad)
    ell = k_p - k_s * math.cos(query.signal_theta_rad) + grating_vector(query, crystal)
    hyp = math.hypot(t, ell)
    if hyp == 0:
        return 0.0
    arg = t / hyp
    if abs(arg) > 1:
        raise ArcsineDomain("arcsin argument outside [-1, 1]")
    return math.asin(arg)


def solve_signal_sweep(query: PhaseMatchQuery, crystal: CrystalSpec,
                       pump_sweep_nm, search_window_nm: tuple[float, float],
                       coarse_points: int = 1001) -> np.ndarray:
    """Collinear signal-wavelength roots for many pump wavelengths at once.

    Vectorized bisection over a shared search window; entries with no sign
    change come back NaN. When several sign changes exist for one pump the
    bracket closest to the window centre is refined. Collinear geometry only.
    """
    if query.signal_theta_rad != 0.0:
        raise DomainError("sweep solver supports collinear geometry only")
    pumps = np.atleast_1d(np.asarray(pump_sweep_nm, dtype=float))
    lo_nm, hi_nm = search_window_nm
    grid = np.linspace(lo_nm, hi_nm, coarse_points)

    pump_um = pumps * 1e-3
    k_p = wavevector_magnitude(
        refractive_index(crystal.axis_set(query.pol_pump), pump_um), pump_um)
    set_s = crystal.axis_set(query.pol_signal)
    set_i = crystal.axis_set(query.pol_idler)
    g = grating_vector(query, crystal)

    def dk(signal_nm):
        # signal_nm: (P,) or (P, S) paired with pumps broadcast on axis 0
        s_um = signal_nm * 1e-3
        p_um = pump_um if signal_nm.ndim == 1 else pump_um[:, None]
        i_um = 1.0 / (1.0 / p_um - 1.0 / s_um)
        k_s = wavevector_magnitude(refractive_index(set_s, s_um), s_um)
        k_i = wavevector_magnitude(refractive_index(set_i, i_um), i_um)
        kp = k_p if signal_nm.ndim == 1 else k_p[:, None]
        return kp - k_s - k_i + g

    mat = dk(np.broadcast_to(grid, (pumps.size, grid.size)).copy())
    sign = np.sign(mat)
    flips = sign[:, :-1] * sign[:, 1:] < 0

    lo = np.full(pumps.size, np.nan)
    hi = np.full(pumps.size, np.nan)
    centre = 0.5 * (lo_nm + hi_nm)
    for i in range(pumps.size):
        idx = np.nonzero(flips[i])[0]
        if idx.size == 0:
            continue
        best = idx[np.argmin(np.abs(0.5 * (grid[idx] + grid[idx + 1]) - centre))] \
            if idx.size > 1 else idx[0]
        lo[i], hi[i] = grid[best], grid[best + 1]

    ok = np.isfinite(lo)
    if not np.any(ok):
        return np.full(pumps.size, np.nan) if np.ndim(pump_sweep_nm) else np.array([np.nan])
    a = lo[ok].copy()
    b = hi[ok].copy()
    fa = dk_sub = None
    # restrict dk to the bracketed pumps for the bisection loop
    k_p_ok = k_p[ok]
    p_um_ok = pump_um[ok]

    def dk_ok(signal_nm):
        s_um = signal_nm * 1e-3
        i_um = 1.0 / (1.0 / p_um_ok - 1.0 / s_um)
        k_s = wavevector_magnitude(refractive_index(set_s, s_um), s_um)
        k_i = wavevector_magnitude(refractive_index(set_i, i_um), i_um)
        return k_p_ok - k_s - k_i + g

    fa = dk_ok(a)
    for _ in range(64):
        mid = 0.5 * (a + b)
        fm = dk_ok(mid)
        left = fa * fm <= 0
        b = np.where(left, mid, b)
        a = np.where(left, a, mid)
        fa = np.where(left, fa, fm)
        if np.max(b - a) < 1e-12:
            break
    roots = np.full(pumps.size, np.nan)
    roots[ok] = 0.5 * (a + b)
    return roots


def snell_external_angle(n_internal: float, theta_internal_rad: float) -> float:
    """Refraction helper: internal angle to external (vacuum-side) angle."""
    arg = n_internal * math.sin(theta_internal_rad)
    if abs(arg) > 1:
        raise ArcsineDomain("total internal reflection: no external angle")
    return math.asin(arg)


def solve_signal_wavelength(query: PhaseMatchQuery, crystal: CrystalSpec,
                            search_window_nm: tuple[float, float],
                            coarse_step_nm: float = COARSE_STEP_NM) -> PhaseMatchSolution:
    """Signal wavelength zeroing the scalar mismatch inside the window.

    Pre-scans the window at coarse_step_nm to bracket sign changes, then
    refines with the Brent solver down to |dk| < 1e-10 um^-1.
    """
    lo, hi = search_window_nm
    if not query.pump_wavelength_nm < lo < hi:
        raise DomainError("search window must lie above the pump wavelength")
    n_pts = max(int(math.ceil((hi - lo) / coarse_step_nm)) + 1, 2)
    grid = np.linspace(lo, hi, n_pts)
    dk = scalar_mismatch(query, grid, crystal)
    sign = np.sign(dk)
    flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    exact = np.nonzero(dk == 0.0)[0]
    brackets = [(grid[i], grid[i + 1]) for i in flips]
    if exact.size:
        brackets.extend((grid[i], grid[i]) for i in exact)
    if not brackets:
        raise NoRootInWindow(
            f"mismatch keeps its sign over [{lo}, {hi}] nm at {coarse_step_nm} nm scan")
    if len(brackets) > 1:
        raise MultipleRoots(brackets)

    b_lo, b_hi = brackets[0]
    if b_lo == b_hi:
        root = float(b_lo)
    else:
        f = lambda lam: scalar_mismatch(query, lam, crystal)
        root = numerics.find_root(f, numerics.bracket_root(f, b_lo, b_hi), tol=1e-12)
    residual = abs(scalar_mismatch(query, root, crystal))
    return PhaseMatchSolution(
        signal_wavelength_nm=root,
        idler_wavelength_nm=idler_wavelength(query.pump_wavelength_nm, root),
        idler_angle_rad=idler_angle(query, root, crystal),
        mismatch_per_um=residual,
    )
