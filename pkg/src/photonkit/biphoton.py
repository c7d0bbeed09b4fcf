"""Joint spectral probability of the fiber-coupled photon pair.

Frequencies are angular, in PHz (rad/fs); lengths in um; times in fs. The
four transverse wavevector integrals are evaluated in closed form as complex
Gaussian quadratic forms, leaving one numerical integral along the crystal.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import numerics
from .dispersion import CrystalSpec, Polarization, refractive_index
from .errors import (
    DegenerateFit,
    DegenerateGrid,
    DomainError,
    EvanescentTransverse,
)
from .phasematch import PhaseMatchQuery, grating_vector

__all__ = [
    "C_UM_PER_FS",
    "PumpSpec",
    "CouplingSpec",
    "JsaGridSpec",
    "JsaGrid",
    "GaussianFit1D",
    "GaussianFit2D",
    "omega_phz_from_wavelength_um",
    "wavelength_um_from_omega_phz",
    "pump_temporal_amplitude",
    "fwhm_omega_to_tau",
    "envelope_tau_from_reciprocal_sigma",
    "phase_mismatch_longitudinal",
    "jsa_grid",
    "marginal",
    "fit_gaussian_1d",
    "fit_gaussian_2d",
    "screening_mask",
]

C_UM_PER_FS = 0.299792458
FWHM_SIGMA = 2.0 * math.sqrt(2.0 * math.log(2.0))
Z_QUAD_ORDER = 64


def omega_phz_from_wavelength_um(wavelength_um):
    return 2.0 * math.pi * C_UM_PER_FS / np.asarray(wavelength_um, dtype=float)


def wavelength_um_from_omega_phz(omega_phz):
    return 2.0 * math.pi * C_UM_PER_FS / np.asarray(omega_phz, dtype=float)


@dataclass(frozen=True)
class PumpSpec:
    """Pulsed pump: central angular frequency (the *sum* frequency 2 omega_0),
    duration parameter tau_p, and transverse beam width."""

    central_frequency_phz: float
    pulse_duration_fs: float
    spatial_width_um: float

    def __post_init__(self):
        if min(self.central_frequency_phz, self.pulse_duration_fs,
               self.spatial_width_um) <= 0:
            raise DomainError("pump parameters must be positive")


@dataclass(frozen=True)
class CouplingSpec:
    """Gaussian fiber-mode widths and optional transverse wavevector offsets."""

    signal_width_um: float
    idler_width_um: float
    signal_offset_per_um: float = 0.0
    idler_offset_per_um: float = 0.0

    def __post_init__(self):
        if self.signal_width_um <= 0 or self.idler_width_um <= 0:
            raise DomainError("mode widths must be positive")


@dataclass(frozen=True)
class JsaGridSpec:
    """n x n frequency grid, each axis spanning omega0 * (1 -+ range_fraction).

    idler_n, when set, decouples the idler sample count from n. Marginal
    convergence studies vary the signal count against a fixed idler comb;
    the joint sum changes with the idler sampling, so comparing marginals
    across signal counts requires the idler axis to stay put.
    """

    n: int
    range_fraction: float
    signal_center_phz: float
    idler_center_phz: float
    idler_n: int | None = None

    def __post_init__(self):
        if self.n < 16 or (self.idler_n is not None and self.idler_n < 16):
            raise DomainError("grid needs n >= 16")
        if not 0 < self.range_fraction < 0.5:
            raise DomainError("range_fraction must be in (0, 0.5)")
        if self.signal_center_phz <= 0 or self.idler_center_phz <= 0:
            raise DomainError("grid centres must be positive")

    def signal_axis(self) -> np.ndarray:
        z = self.range_fraction
        return np.linspace(self.signal_center_phz * (1 - z),
                           self.signal_center_phz * (1 + z), self.n)

    def idler_axis(self) -> np.ndarray:
        z = self.range_fraction
        count = self.n if self.idler_n is None else self.idler_n
        return np.linspace(self.idler_center_phz * (1 - z),
                           self.idler_center_phz * (1 + z), count)


@dataclass
class JsaGrid:
    omega_s_phz: np.ndarray
    omega_i_phz: np.ndarray
    probability: np.ndarray  # [j, k] = p(omega_s[j], omega_i[k])
    normalized: bool = False

    def normalize(self) -> "JsaGrid":
        total = float(self.probability.sum())
        if total <= 0:
            raise DegenerateGrid("grid probabilities sum to zero")
        return JsaGrid(self.omega_s_phz, self.omega_i_phz,
                       self.probability / total, normalized=True)

    def transpose(self) -> "JsaGrid":
        return JsaGrid(self.omega_i_phz.copy(), self.omega_s_phz.copy(),
                       self.probability.T.copy(), self.normalized)


@dataclass(frozen=True)
class GaussianFit1D:
    """b + a * exp(-4 ln2 (omega - center)^2 / fwhm^2) fitted to samples."""

    bias: float
    amplitude: float
    center_phz: float
    fwhm_phz: float
    standard_errors: tuple[float, float, float, float]
    p_values: tuple[float, float, float, float]
    rss: float

    @property
    def sigma_phz(self) -> float:
        return self.fwhm_phz / FWHM_SIGMA


@dataclass(frozen=True)
class GaussianFit2D:
    """Bivariate normal density fit: centres, widths, Pearson correlation."""

    amplitude: float
    signal_center_phz: float
    idler_center_phz: float
    signal_sigma_phz: float
    idler_sigma_phz: float
    pearson: float
    standard_errors: tuple[float, ...]
    near_singular: bool
    rss: float


def pump_temporal_amplitude(omega_phz, pump: PumpSpec):
    """Gaussian pump spectral envelope evaluated at the sum frequency."""
    tau = pump.pulse_duration_fs
    d = np.asarray(omega_phz, dtype=float) - pump.central_frequency_phz
    out = math.sqrt(tau) / math.pi**0.25 * np.exp(-0.5 * tau**2 * d**2)
    return float(out) if out.ndim == 0 else out


def fwhm_omega_to_tau(fwhm_phz: float, convention: str = "workbench") -> float:
    """Pump duration from the measured spectral intensity FWHM.

    The default reproduces the reference data reduction (tau = 8 ln2 / FWHM).
    `convention="fourier"` gives the transform-limited pair of the stated
    envelope, tau = 2 sqrt(ln2) / FWHM; the two differ by design, see README.
    """
    if fwhm_phz <= 0:
        raise DomainError("FWHM must be positive")
    if convention == "workbench":
        return 8.0 * math.log(2.0) / fwhm_phz
    if convention == "fourier":
        return 2.0 * math.sqrt(math.log(2.0)) / fwhm_phz
    raise DomainError(f"unknown convention {convention!r}")


def envelope_tau_from_reciprocal_sigma(tau_fs: float) -> float:
    """Amplitude-envelope duration from a reciprocal-intensity-sigma duration.

    A duration quoted as 1/sigma of the spectral *intensity* maps onto the
    Gaussian amplitude envelope exp(-tau^2 dw^2 / 2) with tau shorter by
    sqrt(2), since the intensity is the squared amplitude.
    """
    if tau_fs <= 0:
        raise DomainError("duration must be positive")
    return tau_fs / math.sqrt(2.0)


def _axis_k(crystal: CrystalSpec, pol: Polarization, omega_phz):
    """Wavevector magnitude n(omega) * omega / c in 1/um."""
    lam_um = wavelength_um_from_omega_phz(omega_phz)
    n = refractive_index(crystal.axis_set(pol), lam_um)
    return n * np.asarray(omega_phz, dtype=float) / C_UM_PER_FS


def phase_mismatch_longitudinal(omega_s_phz: float, omega_i_phz: float,
                                k_s_perp: float, k_i_perp: float,
                                crystal: CrystalSpec, query: PhaseMatchQuery,
                                temperature_k: float | None = None) -> float:
    """Longitudinal mismatch with paraxial k_z = k - k_perp^2 / (2k), 1/um.

    The pump transverse wavevector is the sum of the two photon transverse
    wavevectors. Polarizations, QPM order/sign and temperature come from the
    query (its pump wavelength field is ignored here).
    """
    if temperature_k is not None:
        from dataclasses import replace
        query = replace(query, temperature_k=temperature_k)
    k_s = _axis_k(crystal, query.pol_signal, omega_s_phz)
    k_i = _axis_k(crystal, query.pol_idler, omega_i_phz)
    k_p = _axis_k(crystal, query.pol_pump, omega_s_phz + omega_i_phz)
    k_p_perp = k_s_perp + k_i_perp
    for k, kt in ((k_s, k_s_perp), (k_i, k_i_perp), (k_p, k_p_perp)):
        if kt**2 >= k**2:
            raise EvanescentTransverse("transverse wavevector exceeds total")
    kz_s = k_s - k_s_perp**2 / (2.0 * k_s)
    kz_i = k_i - k_i_perp**2 / (2.0 * k_i)
    kz_p = k_p - k_p_perp**2 / (2.0 * k_p)
    return float(kz_p - kz_s - kz_i + grating_vector(query, crystal))


def _worker_count() -> int:
    env = os.environ.get("WORKBENCH_THREADS", "1")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def jsa_grid(pump: PumpSpec, coupling: CouplingSpec, crystal: CrystalSpec,
             grid: JsaGridSpec, query: PhaseMatchQuery,
             z_order: int = Z_QUAD_ORDER, threads: int | None = None) -> JsaGrid:
    """Joint spectral probability |A_p^t(w_s + w_i) * theta(w_s, w_i)|^2.

    theta is the phase-matching overlap: per crystal slice the four transverse
    integrals reduce to (2 pi)^2 / det A(z) for a complex symmetric 2x2 form A,
    and the slice contributions are summed with Gauss-Legendre nodes along the
    crystal. The returned grid is normalized to unit sum.
    """
    w_s = grid.signal_axis()
    w_i = grid.idler_axis()
    k_s = _axis_k(crystal, query.pol_signal, w_s)          # (n,)
    k_i = _axis_k(crystal, query.pol_idler, w_i)           # (n,)
    w_sum = w_s[:, None] + w_i[None, :]                    # (n, n)
    k_p = _axis_k(crystal, query.pol_pump, w_sum)          # (n, n)
    dk0 = k_p - k_s[:, None] - k_i[None, :] + grating_vector(query, crystal)

    ws2 = coupling.signal_width_um**2
    wi2 = coupling.idler_width_um**2
    wp2 = pump.spatial_width_um**2
    inv_ks = 1.0 / k_s[:, None]
    inv_ki = 1.0 / k_i[None, :]
    inv_kp = 1.0 / k_p

    half_l = 0.5 * crystal.length_um
    nodes, weights = numerics.gauss_legendre(z_order)
    z_nodes = half_l * nodes
    z_weights = half_l * weights

    b_s = ws2 * coupling.signal_offset_per_um
    b_i = wi2 * coupling.idler_offset_per_um
    const_offset = math.exp(-0.5 * (ws2 * coupling.signal_offset_per_um**2
                                    + wi2 * coupling.idler_offset_per_um**2))

    def accumulate(rows: slice) -> np.ndarray:
        acc = np.zeros((rows.stop - rows.start, w_i.size), dtype=complex)
        a_ss0 = ws2 + wp2 + 1j * 0.0
        for z, wz in zip(z_nodes, z_weights):
            a_ss = ws2 + wp2 + 1j * z * (inv_kp[rows] - inv_ks[rows])
            a_ii = wi2 + wp2 + 1j * z * (inv_kp[rows] - inv_ki)
            a_si = wp2 + 1j * z * inv_kp[rows]
            det = a_ss * a_ii - a_si * a_si
            phase = np.exp(1j * dk0[rows] * z)
            term = phase / det
            if b_s != 0.0 or b_i != 0.0:
                # exp(b^T A^-1 b / 2) factor from the offset fiber centres
                # (x-direction only; offsets are scalars along one axis)
                quad = (a_ii * b_s**2 - 2 * a_si * b_s * b_i + a_ss * b_i**2) / det
                term = term * np.exp(0.5 * quad)
            acc += wz * term
        return acc

    n = w_s.size
    workers = threads if threads is not None else _worker_count()
    theta = np.empty((n, w_i.size), dtype=complex)
    if workers > 1:
        chunk = max(1, n // workers)
        slices = [slice(i, min(i + chunk, n)) for i in range(0, n, chunk)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for sl, block in zip(slices, pool.map(accumulate, slices)):
                theta[sl] = block
    else:
        theta[:] = accumulate(slice(0, n))

    prefactor = (coupling.signal_width_um * coupling.idler_width_um
                 * pump.spatial_width_um / math.pi**1.5) * (2.0 * math.pi)**2
    psi = pump_temporal_amplitude(w_sum, pump) * prefactor * const_offset * theta
    prob = np.abs(psi)**2
    if not np.any(prob > 0):
        raise DegenerateGrid("all probabilities underflowed to zero")
    return JsaGrid(w_s, w_i, prob).normalize()


def marginal(grid: JsaGrid, axis: str = "signal"):
    """Marginal distribution over one photon's frequency axis."""
    if not grid.normalized:
        raise DomainError("marginal requires a normalized grid")
    if axis == "signal":
        return grid.omega_s_phz, grid.probability.sum(axis=1)
    if axis == "idler":
        return grid.omega_i_phz, grid.probability.sum(axis=0)
    raise DomainError(f"axis must be 'signal' or 'idler', got {axis!r}")


def _p_values(params, errors, dof):
    out = []
    for v, e in zip(params, errors):
        if e > 0 and np.isfinite(e):
            out.append(float(2.0 * stats.t.sf(abs(v) / e, dof)))
        else:
            out.append(float("nan"))
    return tuple(out)


def fit_gaussian_1d(omega_phz, values) -> GaussianFit1D:
    """Fit b + a exp(-4 ln2 (w - w0)^2 / F^2) to sampled intensity values."""
    x = np.asarray(omega_phz, dtype=float)
    y = np.asarray(values, dtype=float)
    if x.size < 5:
        raise DegenerateFit("need at least 5 samples")
    if np.ptp(y) == 0:
        raise DegenerateFit("constant samples cannot constrain a Gaussian")

    bias0 = float(y.min())
    amp0 = float(y.max() - y.min())
    c0 = float(x[np.argmax(y)])
    above = x[y - bias0 >= 0.5 * amp0]
    fwhm0 = float(above.max() - above.min()) if above.size > 1 else float(np.ptp(x) / 4)
    fwhm0 = max(fwhm0, float(np.ptp(x)) / (x.size - 1))

    def model(p, xx):
        b, a, c, f = p
        if f <= 0:
            return np.full(np.shape(xx), np.nan)
        return b + a * np.exp(-4.0 * math.log(2.0) * (xx - c)**2 / f**2)

    res = numerics.least_squares_fit(model, x, y, [bias0, amp0, c0, fwhm0])
    b, a, c, f = res.parameters
    dof = max(x.size - 4, 1)
    return GaussianFit1D(
        bias=float(b), amplitude=float(a), center_phz=float(c),
        fwhm_phz=float(abs(f)),
        standard_errors=tuple(res.standard_errors),
        p_values=_p_values(res.parameters, res.standard_errors, dof),
        rss=res.residual_sum_squares,
    )


def fit_gaussian_2d(grid: JsaGrid) -> GaussianFit2D:
    """Fit a bivariate normal surface to the joint probability grid."""
    ws = grid.omega_s_phz
    wi = grid.omega_i_phz
    p = grid.probability
    total = p.sum()
    if total <= 0 or np.ptp(p) == 0:
        raise DegenerateFit("degenerate grid support")

    # moment-based start
    ps = p.sum(axis=1) / total
    pi = p.sum(axis=0) / total
    mu_s = float(np.dot(ps, ws))
    mu_i = float(np.dot(pi, wi))
    var_s = float(np.dot(ps, (ws - mu_s)**2))
    var_i = float(np.dot(pi, (wi - mu_i)**2))
    cov = float(((ws - mu_s)[:, None] * (wi - mu_i)[None, :] * p).sum() / total)
    rho0 = cov / math.sqrt(var_s * var_i) if var_s > 0 and var_i > 0 else 0.0
    rho0 = max(min(rho0, 0.999), -0.999)
    amp0 = float(p.max())

    wsg, wig = np.meshgrid(ws, wi, indexing="ij")
    x = np.arange(p.size, dtype=float)
    y = p.ravel()
    wsf = wsg.ravel()
    wif = wig.ravel()

    def model(params, _):
        amp, ms, mi, ss, si, rho = params
        if ss <= 0 or si <= 0 or not -1 < rho < 1:
            return np.full(y.shape, np.nan)
        us = (wsf - ms) / ss
        ui = (wif - mi) / si
        q = (us**2 - 2.0 * rho * us * ui + ui**2) / (2.0 * (1.0 - rho**2))
        return amp * np.exp(-q)

    start = [amp0, mu_s, mu_i, math.sqrt(var_s), math.sqrt(var_i), rho0]
    res = numerics.least_squares_fit(model, x, y, start)
    amp, ms, mi, ss, si, rho = res.parameters
    return GaussianFit2D(
        amplitude=float(amp), signal_center_phz=float(ms), idler_center_phz=float(mi),
        signal_sigma_phz=float(abs(ss)), idler_sigma_phz=float(abs(si)),
        pearson=float(rho), standard_errors=tuple(res.standard_errors),
        near_singular=bool(abs(rho) > 1.0 - 1e-6),
        rss=res.residual_sum_squares,
    )


def screening_mask(fits, mismatches_per_um, p_value_max: float = 0.01,
                   mismatch_max_per_um: float = 1e-4) -> np.ndarray:
    """Measurement screen: keep points whose Gaussian-fit parameters are all
    significant (p-value below the threshold) and whose computed collinear
    mismatch magnitude stays below the cutoff."""
    keep = []
    for fit, dk in zip(fits, mismatches_per_um):
        significant = all(pv < p_value_max for pv in fit.p_values if np.isfinite(pv))
        keep.append(significant and abs(dk) < mismatch_max_per_um)
    return np.asarray(keep, dtype=bool)
