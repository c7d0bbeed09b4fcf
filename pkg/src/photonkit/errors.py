"""Exception hierarchy shared across the workbench."""


class PhotonkitError(Exception):
    """Base class for all workbench errors."""


class DomainError(PhotonkitError, ValueError):
    """Input outside the supported domain of an operation."""


# --- numerics ---

class NoSignChange(PhotonkitError):
    """Root bracket does not straddle a sign change."""


class MaxIterations(PhotonkitError):
    """Iteration budget exhausted before reaching tolerance."""


class SingularJacobian(PhotonkitError):
    """Normal equations are singular; the fit cannot proceed."""


# --- dispersion ---

class PoleProximity(DomainError):
    """Wavelength squared too close to a Sellmeier pole."""


class NegativeRadicand(DomainError):
    """Sellmeier radicand non-positive; no real index exists."""


class Unpoled(PhotonkitError):
    """Operation requires a poled crystal (poling period > 0)."""


# --- phasematch ---

class NoRootInWindow(PhotonkitError):
    """Scalar mismatch has no sign change inside the search window."""


class MultipleRoots(PhotonkitError):
    """More than one sign change detected at coarse-scan resolution."""

    def __init__(self, brackets):
        super().__init__(f"{len(brackets)} sign changes in search window")
        self.brackets = brackets


class ArcsineDomain(DomainError):
    """arcsin argument magnitude exceeds 1."""


# --- sellmeier_fit ---

class InsufficientData(PhotonkitError):
    """Fewer usable data points than required."""


class DivergedFit(PhotonkitError):
    """Fit failed to converge; carries the best-so-far result."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


# --- biphoton ---

class EvanescentTransverse(DomainError):
    """Transverse wavevector exceeds the total wavevector magnitude."""


class DegenerateGrid(PhotonkitError):
    """All grid probabilities underflowed to zero."""


class DegenerateFit(PhotonkitError):
    """Samples cannot constrain the requested model."""


# --- fiber_prop ---

class GridTooCoarse(PhotonkitError):
    """Quadratic spectral phase varies by more than pi between samples."""


class ZeroDispersion(PhotonkitError):
    """Stationary-phase propagation undefined for 2*beta*D = 0."""


# --- waveguides ---

class NoGuidedModes(PhotonkitError):
    """No guided mode exists for the requested geometry/wavelength."""


class BesselRange(DomainError):
    """Requested Bessel order outside the supported range."""


class NoRealSolution(DomainError):
    """Closed-form estimate has a negative radicand."""


class BoundaryResidual(PhotonkitError):
    """Assembled field fails the wall boundary-condition tolerance."""


# --- photon_stats ---

class ZeroMean(DomainError):
    """g2 undefined for zero mean photon number."""


class ZeroVariance(DomainError):
    """Correlation undefined when a variance vanishes."""


# --- cli ---

class ScenarioError(PhotonkitError):
    """Scenario file failed validation; carries diagnostics."""

    def __init__(self, diagnostics):
        super().__init__("; ".join(d.get("message", "") for d in diagnostics))
        self.diagnostics = diagnostics
