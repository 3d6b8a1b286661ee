"""Fit the two-term small-time trace model and recover geometry.

Pipeline: partial heat traces with Weyl-tail truncation bounds, an
automatic time window, a weighted linear fit of

    theta(t) * t^(n/2) = a0 + a1 * sqrt(t)  (+ c * t guard term),

then inversion of (a0, a1) into volume and boundary area and the
ball-rigidity audit. The guard term is a reported diagnostic: it absorbs
constant-order trace contributions (corners, curvature) that the
two-term model does not carry, and is discarded before recovery.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaincc

from .errors import ConsistencyError, FitError, WindowError
from .kernel_asymptotics import (
    BoundaryCondition,
    GeometricData,
    IsoperimetricAudit,
    boundary_coefficient,
    interior_coefficient,
    isoperimetric_audit,
    recover_geometry,
)
from .materials import LameParameters
from .mesh_geometry import to_geometric_data
from .spectra import Spectrum

__all__ = [
    "TraceSample",
    "FitResult",
    "RecoveredGeometry",
    "heat_trace_partial",
    "select_window",
    "geometric_times",
    "fit_asymptotics",
    "end_to_end_recover",
]

MIN_EIGENVALUES = 50
MIN_SAMPLES = 8
CONDITION_LIMIT = 1e8


@dataclass(frozen=True)
class TraceSample:
    """Partial heat trace at one time, with an estimated tail bound."""

    t: float
    theta: float
    truncation_bound: float

    def __post_init__(self):
        if not (self.t > 0.0 and self.theta > 0.0):
            raise ValueError("t and theta must be positive")
        if self.truncation_bound < 0.0:
            raise ValueError("truncation_bound must be non-negative")


@dataclass(frozen=True)
class FitResult:
    """Coefficients of the transformed trace fit and its diagnostics.

    ``guard_c`` is the coefficient of the optional t guard column;
    ``cov`` is the 2x2 covariance of (a0_hat, a1_hat) from the weighted
    normal equations, used to propagate fit uncertainty downstream.
    """

    a0_hat: float
    a1_hat: float
    window: tuple
    residual_rms: float
    condition: float
    n_samples: int
    guard_c: float | None
    a0_se: float
    a1_se: float
    cov: tuple

    def __post_init__(self):
        t_min, t_max = self.window
        if not t_min < t_max:
            raise ValueError("window must satisfy t_min < t_max")
        if not math.isfinite(self.residual_rms):
            raise ValueError("residual_rms must be finite")


def _weyl_amplitude(spectrum: Spectrum) -> float:
    # Empirical leading Weyl constant N(lambda) ~ W * lambda^{n/2}; the
    # pipeline may not consume ground-truth volume, so W comes from the
    # spectrum itself.
    lam_top = float(spectrum.eigenvalues[-1])
    if lam_top <= 0.0:
        raise WindowError("spectrum has no positive eigenvalues")
    return spectrum.count / lam_top ** (spectrum.dim / 2.0)


def _truncation_bound(spectrum: Spectrum, t: float, w_hat: float) -> float:
    # Tail integral of exp(-t*eta) against the Weyl density
    # W * (n/2) * eta^{n/2-1}, from the last computed eigenvalue upward.
    n = spectrum.dim
    lam_top = float(spectrum.eigenvalues[-1])
    return float(
        w_hat
        * math.gamma(n / 2.0 + 1.0)
        * t ** (-n / 2.0)
        * gammaincc(n / 2.0, t * lam_top)
    )


def heat_trace_partial(spectrum: Spectrum, t: float) -> TraceSample:
    """Sum exp(-lambda*t) over the available eigenvalues.

    The unknown tail above the last eigenvalue is estimated from the
    empirical Weyl density and reported as ``truncation_bound``.
    """
    if not t > 0.0:
        raise ValueError("t must be positive")
    theta = float(np.sum(np.exp(-spectrum.eigenvalues * t)))
    bound = _truncation_bound(spectrum, t, _weyl_amplitude(spectrum))
    return TraceSample(t=t, theta=theta, truncation_bound=bound)


def select_window(
    spectrum: Spectrum,
    n: int,
    tol: float = 1e-4,
    expand: float = 20.0,
) -> tuple:
    """Usable time window for the asymptotic fit.

    t_min is where the estimated truncation fraction drops to ``tol``;
    t_max is expand * t_min capped by 1/lambda_10 so the fit stays in the
    many-mode regime. An empty window raises with the eigenvalue count
    that would be needed.
    """
    if spectrum.count < MIN_EIGENVALUES:
        raise WindowError(
            f"need at least {MIN_EIGENVALUES} eigenvalues, got {spectrum.count}"
        )
    if n != spectrum.dim:
        raise ConsistencyError(f"spectrum has dim {spectrum.dim}, requested n={n}")
    w_hat = _weyl_amplitude(spectrum)
    lam_top = float(spectrum.eigenvalues[-1])

    def fraction(t):
        theta = float(np.sum(np.exp(-spectrum.eigenvalues * t)))
        return _truncation_bound(spectrum, t, w_hat) / theta

    lo, hi = 0.01 / lam_top, 200.0 / lam_top
    if fraction(lo) <= tol:
        t_min = lo
    else:
        for _ in range(200):
            mid = math.sqrt(lo * hi)
            if fraction(mid) > tol:
                lo = mid
            else:
                hi = mid
            if hi / lo < 1.0 + 1e-10:
                break
        t_min = hi

    lam_10 = float(spectrum.eigenvalues[min(9, spectrum.count - 1)])
    cap = 1.0 / lam_10 if lam_10 > 0.0 else math.inf
    t_max = min(expand * t_min, cap)
    if not t_max > t_min:
        needed_lam = lam_top * t_min / (t_max / 1.5)
        needed = math.ceil(w_hat * needed_lam ** (n / 2.0))
        raise WindowError(
            f"empty window: t_min={t_min:.3e} vs cap 1/lambda_10={cap:.3e}; "
            f"roughly N >= {needed} eigenvalues are required"
        )
    return t_min, t_max


def geometric_times(t_min: float, t_max: float, count: int = 16) -> np.ndarray:
    """Geometrically spaced sample times across the window."""
    if not (t_min > 0.0 and t_max > t_min):
        raise ValueError("need 0 < t_min < t_max")
    return np.geomspace(t_min, t_max, count)


def fit_asymptotics(
    samples: list,
    n: int,
    guard: bool = True,
    condition_limit: float = CONDITION_LIMIT,
) -> FitResult:
    """Weighted least squares on theta(t) * t^{n/2} = a0 + a1*sqrt(t) (+ c*t).

    Weights follow the truncation bounds (transformed to the fitted
    variable) with a small relative floor, so exact samples are weighted
    uniformly. With ``guard`` the design gains a t column whose
    coefficient is reported as a contamination diagnostic and excluded
    from the returned model.
    """
    if len(samples) < MIN_SAMPLES:
        raise FitError(f"need at least {MIN_SAMPLES} samples, got {len(samples)}")
    t = np.array([s.t for s in samples])
    theta = np.array([s.theta for s in samples])
    bound = np.array([s.truncation_bound for s in samples])
    if np.any(np.diff(t) <= 0.0):
        raise FitError("sample times must be strictly increasing")

    y = theta * t ** (n / 2.0)
    # ppm relative floor: no sample is trusted beyond what double-precision
    # trace sums and upstream eigenvalue accuracy support, which also keeps
    # the weight spread (and so the normal-system conditioning) bounded
    sigma = bound * t ** (n / 2.0) + 1e-6 * np.abs(y)
    weight = 1.0 / sigma

    cols = [np.ones_like(t), np.sqrt(t)]
    if guard:
        cols.append(t)
    design = np.column_stack(cols)
    xw = design * weight[:, None]
    yw = y * weight

    # column equilibration: the reported condition measures collinearity
    # of the normal system, not the (intentional) spread of row weights
    col_scale = np.linalg.norm(xw, axis=0)
    if np.any(col_scale == 0.0):
        raise FitError("degenerate design column")
    xw_eq = xw / col_scale
    condition = float(np.linalg.cond(xw_eq)) ** 2
    if condition > condition_limit:
        raise FitError(
            f"normal system condition {condition:.3e} exceeds {condition_limit:.0e}"
        )
    beta_eq, _, _, _ = np.linalg.lstsq(xw_eq, yw, rcond=None)
    beta = beta_eq / col_scale
    fitted = design @ beta
    residual = y - fitted
    dof = max(1, len(samples) - design.shape[1])
    scaled_residual_var = float(np.sum((residual * weight) ** 2)) / dof
    normal_inv = (np.linalg.inv(xw_eq.T @ xw_eq) / col_scale) / col_scale[:, None]
    cov_full = scaled_residual_var * normal_inv

    return FitResult(
        a0_hat=float(beta[0]),
        a1_hat=float(beta[1]),
        window=(float(t[0]), float(t[-1])),
        residual_rms=float(np.sqrt(np.mean(residual**2))),
        condition=condition,
        n_samples=len(samples),
        guard_c=float(beta[2]) if guard else None,
        a0_se=float(np.sqrt(cov_full[0, 0])),
        a1_se=float(np.sqrt(cov_full[1, 1])),
        cov=(
            float(cov_full[0, 0]),
            float(cov_full[0, 1]),
            float(cov_full[1, 1]),
        ),
    )


@dataclass(frozen=True)
class RecoveredGeometry:
    """Geometry heard from a spectrum, with fit and audit attached."""

    geometry: GeometricData
    fit: FitResult
    audit: IsoperimetricAudit
    volume_rel_err: float | None = None
    boundary_rel_err: float | None = None


def _ratio_sigma(fit: FitResult, params, n, bc) -> float:
    # linear propagation of the (a0, a1) covariance onto the
    # isoperimetric ratio S / V^{(n-1)/n}
    rho0 = interior_coefficient(params, n)
    rho1 = boundary_coefficient(params, n, bc)
    volume = fit.a0_hat / rho0
    surface = fit.a1_hat / rho1
    power = (n - 1) / n
    dr_da0 = -power * surface * volume ** (-power - 1.0) / rho0
    dr_da1 = volume ** (-power) / rho1
    c00, c01, c11 = fit.cov
    var = dr_da0**2 * c00 + 2.0 * dr_da0 * dr_da1 * c01 + dr_da1**2 * c11
    return math.sqrt(max(var, 0.0))


def _ground_truth(spectrum: Spectrum) -> GeometricData | None:
    if spectrum.domain_meta is not None:
        return to_geometric_data(spectrum.domain_meta)
    if spectrum.provenance.get("type") == "analytic_interval":
        return GeometricData(
            dim=1,
            volume=float(spectrum.provenance["length"]),
            boundary_area=2.0,  # two endpoints
        )
    return None


def end_to_end_recover(
    spectrum: Spectrum,
    params: LameParameters,
    n: int,
    bc: BoundaryCondition,
    n_samples: int = 16,
    tol: float = 1e-4,
    expand: float = 20.0,
    guard: bool = True,
    audit_tol: float = 0.08,
) -> RecoveredGeometry:
    """The full hear-the-shape pipeline for one spectrum.

    Chains window selection, trace sampling, the asymptotic fit,
    coefficient inversion and the ball audit. Metadata on the spectrum
    must agree with the requested (params, bc, n).
    """
    if spectrum.bc is not bc:
        raise ConsistencyError(
            f"spectrum carries bc={spectrum.bc.value}, requested {bc.value}"
        )
    if spectrum.params != params:
        raise ConsistencyError(
            f"spectrum carries params {spectrum.params}, requested {params}"
        )
    if spectrum.dim != n:
        raise ConsistencyError(f"spectrum has dim {spectrum.dim}, requested n={n}")

    t_min, t_max = select_window(spectrum, n, tol=tol, expand=expand)
    samples = [heat_trace_partial(spectrum, t) for t in geometric_times(t_min, t_max, n_samples)]
    fit = fit_asymptotics(samples, n, guard=guard)
    geometry = recover_geometry(fit.a0_hat, fit.a1_hat, params, n, bc)
    audit = isoperimetric_audit(
        geometry, tol=audit_tol, ratio_sigma=_ratio_sigma(fit, params, n, bc)
    )

    truth = _ground_truth(spectrum)
    vol_err = bnd_err = None
    if truth is not None:
        vol_err = abs(geometry.volume - truth.volume) / truth.volume
        bnd_err = abs(geometry.boundary_area - truth.boundary_area) / truth.boundary_area
    return RecoveredGeometry(
        geometry=geometry,
        fit=fit,
        audit=audit,
        volume_rel_err=vol_err,
        boundary_rel_err=bnd_err,
    )
