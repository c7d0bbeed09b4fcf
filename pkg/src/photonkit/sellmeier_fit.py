"""Estimate Sellmeier coefficients (a_z0, a_z1, a_z2) from pump-wavelength vs
signal-central-wavelength data through the implicit phase-matching model."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from . import numerics, phasematch
from .dispersion import CrystalSpec, SellmeierSet
from .errors import (
    DivergedFit,
    DomainError,
    InsufficientData,
    MultipleRoots,
    NoRootInWindow,
)

__all__ = [
    "MeasurementPoint",
    "SellmeierFitReport",
    "FitSetup",
    "model_signal_wavelength",
    "rss",
    "fit",
    "synthesize_noisy_dataset",
    "load_dataset_csv",
    "save_dataset_csv",
    "sellmeier_fraction_ranges",
]

MAX_NOISE_FRACTION = 0.05


@dataclass(frozen=True)
class MeasurementPoint:
    pump_nm: float
    signal_nm: float
    sigma_nm: float = 1.0

    def __post_init__(self):
        if self.pump_nm <= 0 or self.signal_nm <= 0 or self.sigma_nm <= 0:
            raise DomainError("measurement fields must be positive")


@dataclass(frozen=True)
class SellmeierFitReport:
    fitted: tuple[float, float, float]
    uncertainties: tuple[float, float, float]
    rss_nm2: float
    rss_start_nm2: float
    average_error_nm: float
    n_points: int
    converged: bool
    iterations: int


@dataclass(frozen=True)
class FitSetup:
    """Everything held fixed during the fit: crystal, query template, window."""

    crystal: CrystalSpec
    query: phasematch.PhaseMatchQuery
    search_window_nm: tuple[float, float] = (500.0, 600.0)
    free_indices: tuple[int, ...] = (0, 1, 2)


def _crystal_with_z(setup: FitSetup, coeffs: Sequence[float]) -> CrystalSpec:
    base = setup.crystal.sellmeier_z.as_tuple()
    full = list(base)
    for idx, value in zip(setup.free_indices, coeffs):
        full[idx] = float(value)
    return replace(setup.crystal, sellmeier_z=SellmeierSet(*full))


def model_signal_wavelength(pump_nm: float, coeffs: Sequence[float],
                            setup: FitSetup) -> float:
    """Signal central wavelength predicted by the phase-matching root solve.

    Returns NaN when no root lies in the window, so the fitter can mask the
    point for the current step.
    """
    crystal = _crystal_with_z(setup, coeffs)
    query = replace(setup.query, pump_wavelength_nm=float(pump_nm))
    try:
        sol = phasematch.solve_signal_wavelength(query, crystal, setup.search_window_nm)
    except NoRootInWindow:
        return math.nan
    except MultipleRoots as exc:
        # Take the bracket closest to the window centre; the sweep data the
        # fit consumes is single-branch by construction.
        mid = 0.5 * sum(setup.search_window_nm)
        b = min(exc.brackets, key=lambda br: abs(0.5 * (br[0] + br[1]) - mid))
        sol = phasematch.solve_signal_wavelength(query, crystal, b,
                                                 coarse_step_nm=(b[1] - b[0]) or 0.1)
    return sol.signal_wavelength_nm


def rss(points: Sequence[MeasurementPoint], coeffs: Sequence[float],
        setup: FitSetup) -> float:
    """Residual sum of squares in nm^2 over the dataset."""
    total = 0.0
    for pt in points:
        model = model_signal_wavelength(pt.pump_nm, coeffs, setup)
        if math.isnan(model):
            raise NoRootInWindow(f"no model root for pump {pt.pump_nm} nm")
        total += (pt.signal_nm - model) ** 2
    return total


def fit(points: Sequence[MeasurementPoint], start: Sequence[float],
        setup: FitSetup, weighted: bool = False,
        max_iter: int = 400) -> SellmeierFitReport:
    """Levenberg-Marquardt fit of the free z-axis coefficients.

    Points whose model root vanishes during a step are masked for that step.
    The report carries both the fitted RSS and the RSS at the start values.
    """
    n_free = len(setup.free_indices)
    if len(points) < n_free + 1:
        raise InsufficientData(f"need at least {n_free + 1} points")
    pumps = np.array([pt.pump_nm for pt in points])
    signals = np.array([pt.signal_nm for pt in points])
    weights = (np.array([1.0 / pt.sigma_nm**2 for pt in points])
               if weighted else None)

    def model(params, x):
        crystal = _crystal_with_z(setup, params)
        return phasematch.solve_signal_sweep(setup.query, crystal, np.atleast_1d(x),
                                             setup.search_window_nm)

    start = np.asarray(start, dtype=float)
    start_rss = rss(points, start, setup)
    result = numerics.least_squares_fit(model, pumps, signals, start,
                                        weights=weights, max_iter=max_iter)
    report = SellmeierFitReport(
        fitted=tuple(result.parameters),
        uncertainties=tuple(result.standard_errors),
        rss_nm2=result.residual_sum_squares,
        rss_start_nm2=start_rss,
        average_error_nm=math.sqrt(result.residual_sum_squares / len(points)),
        n_points=len(points),
        converged=result.converged,
        iterations=result.iterations,
    )
    if not result.converged and report.rss_nm2 > report.rss_start_nm2:
        raise DivergedFit("fit failed to improve on the starting coefficients",
                          result=report)
    return report


def synthesize_noisy_dataset(coeffs: Sequence[float], pump_sweep_nm: Sequence[float],
                             noise_fraction: float, seed: int,
                             setup: FitSetup) -> list[MeasurementPoint]:
    """Model-generated dataset with Gaussian noise proportional to the value."""
    if not 0 <= noise_fraction <= MAX_NOISE_FRACTION:
        raise DomainError(f"noise_fraction must be in [0, {MAX_NOISE_FRACTION}]")
    rng = np.random.Generator(np.random.Philox(seed))
    points = []
    for pump in pump_sweep_nm:
        value = model_signal_wavelength(pump, coeffs, setup)
        if math.isnan(value):
            continue
        sigma = noise_fraction * value
        noisy = value + sigma * rng.standard_normal() if sigma > 0 else value
        points.append(MeasurementPoint(pump_nm=float(pump), signal_nm=float(noisy),
                                       sigma_nm=float(sigma) if sigma > 0 else 1.0))
    return points


def load_dataset_csv(path) -> list[MeasurementPoint]:
    """Read a `lambda_pump_nm,lambda_vis_nm,sigma_nm` dataset file."""
    points = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            points.append(MeasurementPoint(
                pump_nm=float(row["lambda_pump_nm"]),
                signal_nm=float(row["lambda_vis_nm"]),
                sigma_nm=float(row.get("sigma_nm") or 1.0),
            ))
    return points


def save_dataset_csv(points: Sequence[MeasurementPoint], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda_pump_nm", "lambda_vis_nm", "sigma_nm"])
        for pt in points:
            writer.writerow([repr(pt.pump_nm), repr(pt.signal_nm), repr(pt.sigma_nm)])


def sellmeier_fraction_ranges(sellmeier: SellmeierSet,
                              lambda_um_range: tuple[float, float] = (0.4, 1.8),
                              samples: int = 2001) -> tuple[float, float]:
    """Value ranges of the two pole fractions over a wavelength interval.

    Returns (range of a1/(lam^2-a2), range of a3/(lam^2-a4)); used to justify
    freeing only the first-fraction coefficients in the fit.
    """
    lam2 = np.linspace(*lambda_um_range, samples) ** 2
    f1 = sellmeier.a1 / (lam2 - sellmeier.a2)
    f2 = sellmeier.a3 / (lam2 - sellmeier.a4)
    return float(np.ptp(f1)), float(np.ptp(f2))
