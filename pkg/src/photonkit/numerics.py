"""Shared numerical kernel: root bracketing, quadrature, damped least squares,
and real-order Bessel functions of both kinds."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import optimize, special

from .errors import DomainError, MaxIterations, NoSignChange, SingularJacobian

__all__ = [
    "RootBracket",
    "FitResult",
    "bracket_root",
    "find_root",
    "gauss_legendre",
    "integrate",
    "least_squares_fit",
    "bessel_jy",
    "bessel_jy_derivatives",
]

MAX_BESSEL_ORDER = 60.0

# Levenberg-Marquardt schedule constants.
LM_LAMBDA0 = 1e-3
LM_STEP_TOL = 1e-10
LM_RSS_TOL = 1e-12


@dataclass(frozen=True)
class RootBracket:
    """Interval [lo, hi] with function values of opposite sign at the ends."""

    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise NoSignChange(f"bracket requires lo < hi, got [{self.lo}, {self.hi}]")
        if self.f_lo * self.f_hi > 0:
            raise NoSignChange(
                f"no sign change: f({self.lo})={self.f_lo}, f({self.hi})={self.f_hi}"
            )


def bracket_root(f: Callable[[float], float], lo: float, hi: float) -> RootBracket:
    """Evaluate f at the interval ends and build a RootBracket."""
    return RootBracket(lo, hi, f(lo), f(hi))


@dataclass
class FitResult:
    parameters: np.ndarray
    standard_errors: np.ndarray
    residual_sum_squares: float
    converged: bool
    iterations: int


def find_root(f: Callable[[float], float], bracket: RootBracket, tol: float = 1e-12,
              max_iter: int = 200) -> float:
    """Root of f inside the bracket via Brent's method (bisection-safeguarded)."""
    if tol <= 0:
        raise DomainError("tol must be positive")
    # Degenerate brackets: an endpoint is already a root.
    if bracket.f_lo == 0.0:
        return bracket.lo
    if bracket.f_hi == 0.0:
        return bracket.hi
    try:
        x, res = optimize.brentq(f, bracket.lo, bracket.hi, xtol=tol,
                                 maxiter=max_iter, full_output=True)
    except RuntimeError as exc:
        raise MaxIterations(str(exc)) from exc
    if not res.converged:
        raise MaxIterations(f"brentq did not converge in {max_iter} iterations")
    return float(x)


@lru_cache(maxsize=64)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1], cached per order."""
    if order < 2:
        raise DomainError("quadrature order must be >= 2")
    nodes, weights = leggauss(order)
    return nodes, weights


def integrate(f: Callable[[float], float], a: float, b: float, order: int = 32) -> float:
    """Gauss-Legendre approximation of the integral of f over [a, b].

    Exact (to roundoff) for polynomials of degree <= 2*order - 1.
    """
    if not a < b:
        raise DomainError("integration requires a < b")
    nodes, weights = gauss_legendre(order)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = mid + half * nodes
    try:
        fx = np.asarray(f(x), dtype=float)
        if fx.shape != x.shape:
            raise ValueError
    except (TypeError, ValueError):
        fx = np.array([f(xi) for xi in x], dtype=float)
    return float(half * np.dot(weights, fx))


def _jacobian(model, params, x, mask):
    """Forward-difference Jacobian of the model at the masked sample points."""
    p = np.asarray(params, dtype=float)
    base = _eval_model(model, p, x)
    cols = []
    for j in range(p.size):
        step = 1.49e-8 * max(abs(p[j]), 1.0)
        pj = p.copy()
        pj[j] += step
        cols.append((_eval_model(model, pj, x) - base) / step)
    jac = np.column_stack(cols)
    return jac[mask]


def _eval_model(model, params, x):
    try:
        out = np.asarray(model(params, x), dtype=float)
        if out.shape != np.shape(x):
            raise ValueError
        return out
    except (TypeError, ValueError):
        return np.array([model(params, xi) for xi in x], dtype=float)


def least_squares_fit(model: Callable, xdata: Sequence[float], ydata: Sequence[float],
                      initial: Sequence[float], weights: Sequence[float] | None = None,
                      max_iter: int = 200) -> FitResult:
    """Levenberg-Marquardt minimization of sum w_i (y_i - model(p, x_i))^2.

    The model may return NaN for individual points; those points are masked for
    the current step rather than aborting the fit. Damping starts at 1e-3 and is
    divided/multiplied by 10 on accepted/rejected steps. Standard errors come
    from the Jacobian-based covariance estimate scaled by residual variance.
    """
    x = np.asarray(xdata, dtype=float)
    y = np.asarray(ydata, dtype=float)
    p = np.array(initial, dtype=float)
    if weights is None:
        w = np.ones_like(y)
    else:
        w = np.asarray(weights, dtype=float)
        if np.any(w <= 0):
            raise DomainError("weights must be positive")
    if y.size < p.size:
        raise DomainError("need at least as many data points as parameters")

    def masked_rss(params):
        m = _eval_model(model, params, x)
        mask = np.isfinite(m)
        if not mask.any():
            return np.inf, mask, m
        r = np.sqrt(w[mask]) * (y[mask] - m[mask])
        return float(np.dot(r, r)), mask, m

    def guarded_rss(params):
        # Trial parameters may leave the model's physical domain entirely;
        # treat that as an infinitely bad step rather than a failure.
        try:
            return masked_rss(params)
        except Exception:
            return np.inf, None, None

    rss, mask, m = masked_rss(p)
    if not np.isfinite(rss):
        raise DomainError("model not evaluable at the initial parameters")
    lam = LM_LAMBDA0
    converged = False
    iterations = 0
    jac = None
    for iterations in range(1, max_iter + 1):
        jac = _jacobian(model, p, x, mask)
        sw = np.sqrt(w[mask])
        jw = jac * sw[:, None]
        r = sw * (y[mask] - m[mask])
        a = jw.T @ jw
        g = jw.T @ r
        accepted = False
        while lam < 1e14:
            damp = a + lam * np.diag(np.maximum(np.diag(a), 1e-30))
            try:
                dp = np.linalg.solve(damp, g)
            except np.linalg.LinAlgError as exc:
                raise SingularJacobian(str(exc)) from exc
            trial = p + dp
            trial_rss, trial_mask, trial_m = guarded_rss(trial)
            if (np.isfinite(trial_rss) and trial_rss <= rss
                    and np.count_nonzero(trial_mask) >= np.count_nonzero(mask)):
                rel_step = np.max(np.abs(dp) / np.maximum(np.abs(p), 1e-300))
                rel_drop = (rss - trial_rss) / max(rss, 1e-300)
                p, rss, mask, m = trial, trial_rss, trial_mask, trial_m
                lam = max(lam / 10.0, 1e-12)
                accepted = True
                if rel_step < LM_STEP_TOL or rel_drop < LM_RSS_TOL:
                    converged = True
                break
            lam *= 10.0
        if converged or not accepted:
            break

    if jac is None:
        jac = _jacobian(model, p, x, mask)
    n_used = int(np.count_nonzero(mask))
    dof = max(n_used - p.size, 1)
    sw = np.sqrt(w[mask])
    jw = jac * sw[:, None]
    try:
        cov = np.linalg.inv(jw.T @ jw) * (rss / dof)
        se = np.sqrt(np.maximum(np.diag(cov), 0.0))
    except np.linalg.LinAlgError:
        se = np.full(p.size, np.nan)
    return FitResult(parameters=p, standard_errors=se,
                     residual_sum_squares=rss, converged=converged,
                     iterations=iterations)


def _check_bessel_domain(order, x):
    order = np.asarray(order, dtype=float)
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("bessel_jy requires x > 0")
    if np.any(order < 0) or np.any(order > MAX_BESSEL_ORDER):
        raise DomainError(f"bessel_jy supports 0 <= order <= {MAX_BESSEL_ORDER}")
    return order, x


def bessel_jy(order, x):
    """Bessel functions J_nu(x) and Y_nu(x) for real order nu in [0, 60], x > 0."""
    order, x = _check_bessel_domain(order, x)
    j = special.jv(order, x)
    y = special.yv(order, x)
    if j.ndim == 0:
        return float(j), float(y)
    return j, y


def bessel_jy_derivatives(order, x):
    """First derivatives J'_nu(x), Y'_nu(x) on the same domain."""
    order, x = _check_bessel_domain(order, x)
    jp = special.jvp(order, x)
    yp = special.yvp(order, x)
    if jp.ndim == 0:
        return float(jp), float(yp)
    return jp, yp
