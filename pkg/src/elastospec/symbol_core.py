"""Symbol calculus for the elasticity operator -tau*Lap - (tau+mu)*grad(div).

The Fourier symbol is the matrix A(xi) = tau*|xi|^2*I + (tau+mu)*xi xi^T.
Its resolvent trace, determinant and heat contraction all factor through
the two wave speeds tau and 2*tau+mu; the closed forms here are each
paired with a brute-force numerical oracle.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ContourError, PoleProximityError
from .materials import LameParameters

__all__ = [
    "SymbolMatrix",
    "build_symbol",
    "pole_locations",
    "resolvent_trace_closed",
    "resolvent_trace_bruteforce",
    "symbol_determinant_closed",
    "symbol_determinant_bruteforce",
    "parametrix_residual",
    "residue_heat_symbol",
    "contour_integral_oracle",
]


@dataclass(frozen=True)
class SymbolMatrix:
    """The n x n symbol A(xi) for a fixed covariable xi.

    Eigenvalues are tau*|xi|^2 with multiplicity n-1 (transverse family)
    and (2*tau+mu)*|xi|^2 with multiplicity 1 (longitudinal family).
    """

    dim: int
    params: LameParameters
    xi: np.ndarray
    entries: np.ndarray


def build_symbol(params: LameParameters, xi) -> SymbolMatrix:
    """Assemble A(xi) = tau*|xi|^2*I + (tau+mu)*xi xi^T entrywise."""
    xi = np.asarray(xi, dtype=float)
    if xi.ndim != 1 or xi.size == 0:
        raise ValueError("xi must be a non-empty 1-D vector")
    n = xi.size
    norm_sq = float(xi @ xi)
    entries = params.tau * norm_sq * np.eye(n) + (params.tau + params.mu) * np.outer(xi, xi)
    # outer() is exactly symmetric; no symmetrization pass needed
    return SymbolMatrix(dim=n, params=params, xi=xi, entries=entries)


def pole_locations(params: LameParameters, xi_norm_sq: float):
    """The two resolvent poles tau*|xi|^2 and (2*tau+mu)*|xi|^2."""
    return params.shear_speed_sq * xi_norm_sq, params.pressure_speed_sq * xi_norm_sq


def _pole_tolerance(params: LameParameters, xi_norm_sq: float) -> float:
    # Keeps the brute-force inverse well conditioned near either pole.
    return 1e-8 * max(1.0, params.pressure_speed_sq * xi_norm_sq)


def _check_off_poles(params: LameParameters, xi_norm_sq: float, lam: complex):
    tol = _pole_tolerance(params, xi_norm_sq)
    for pole in pole_locations(params, xi_norm_sq):
        if abs(lam - pole) < tol:
            raise PoleProximityError(
                f"lambda={lam} within {tol:.3e} of resolvent pole {pole:.6e}"
            )


def resolvent_trace_closed(
    params: LameParameters, n: int, xi_norm_sq: float, lam: complex
) -> complex:
    """Trace of (lam*I - A)^{-1} in factored closed form.

    Equals (lam - tau*s)^{-1} (lam - (2tau+mu)*s)^{-1}
    * [n*lam - ((2n-1)*tau + (n-1)*mu) * s] with s = |xi|^2.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    _check_off_poles(params, xi_norm_sq, lam)
    return _trace_formula(params, n, xi_norm_sq, lam)


def _trace_formula(params, n, xi_norm_sq, lam):
    # Shared by the scalar entry point and the vectorized contour oracle.
    s = xi_norm_sq
    tau, mu = params.tau, params.mu
    numer = n * lam - ((2 * n - 1) * tau + (n - 1) * mu) * s
    return numer / ((lam - tau * s) * (lam - (2 * tau + mu) * s))


def resolvent_trace_bruteforce(params: LameParameters, xi, lam: complex) -> complex:
    """Oracle: trace of the dense LU inverse of lam*I - A(xi)."""
    sym = build_symbol(params, xi)
    s = float(sym.xi @ sym.xi)
    _check_off_poles(params, s, lam)
    shifted = lam * np.eye(sym.dim) - sym.entries.astype(complex)
    inv = np.linalg.inv(shifted)
    return complex(np.trace(inv))


def symbol_determinant_closed(
    params: LameParameters, n: int, xi_norm_sq: float, lam: complex
) -> complex:
    """det(lam*I - A) = (lam - tau*s)^(n-1) * (lam - (2tau+mu)*s)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    s = xi_norm_sq
    return (lam - params.tau * s) ** (n - 1) * (lam - params.pressure_speed_sq * s)


def symbol_determinant_bruteforce(params: LameParameters, xi, lam: complex) -> complex:
    """Oracle: dense LU determinant of lam*I - A(xi)."""
    sym = build_symbol(params, xi)
    shifted = lam * np.eye(sym.dim) - sym.entries.astype(complex)
    return complex(np.linalg.det(shifted))


def parametrix_residual(params: LameParameters, xi, lam: complex) -> float:
    """Operator norm of b0*(lam*I - A) - I with b0 the numerical inverse.

    The symbol has no x dependence, so the leading parametrix term is the
    exact inverse and every higher-order correction vanishes; the residual
    must be at machine-precision level.
    """
    sym = build_symbol(params, xi)
    s = float(sym.xi @ sym.xi)
    _check_off_poles(params, s, lam)
    shifted = lam * np.eye(sym.dim) - sym.entries.astype(complex)
    b0 = np.linalg.inv(shifted)
    residual = b0 @ shifted - np.eye(sym.dim)
    return float(np.linalg.norm(residual, 2))


def residue_heat_symbol(
    params: LameParameters, n: int, xi_norm_sq: float, t: float
) -> float:
    """Residue contraction (n-1)*exp(-t*tau*s) + exp(-t*(2tau+mu)*s).

    This is the value of (1/2*pi*i) * contour integral of
    exp(-t*lam) * Tr (lam*I - A)^{-1} around both poles.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not t > 0.0:
        raise ValueError("t must be positive")
    s = xi_norm_sq
    return (n - 1) * np.exp(-t * params.tau * s) + np.exp(
        -t * params.pressure_speed_sq * s
    )


def contour_circle(params: LameParameters, xi_norm_sq: float):
    """Center and radius of the default integration circle.

    Centered midway between the poles, radius 1.5x the pole half-separation
    plus |center|, so both poles (and the origin) sit strictly inside. A
    unit radius floors the degenerate xi = 0 case where both poles collapse
    to the origin.
    """
    s = xi_norm_sq
    lo, hi = pole_locations(params, s)
    center = 0.5 * (lo + hi)
    half_sep = 0.5 * (hi - lo)
    radius = 1.5 * half_sep + abs(center)
    if radius == 0.0:
        radius = 1.0
    return center, radius


def contour_integral_oracle(
    params: LameParameters,
    n: int,
    xi_norm_sq: float,
    t: float,
    nodes: int = 4096,
    radius: float | None = None,
) -> float:
    """Oracle: trapezoid quadrature of the heat contraction contour integral.

    Evaluates (1/2*pi*i) * integral over a circle of
    exp(-t*lam) * Tr (lam*I - A)^{-1} d(lam). The integrand is periodic and
    analytic on the contour, so the composite trapezoid rule converges
    geometrically in the node count. Roundoff grows like
    exp(t * (radius - tau*|xi|^2)) from cancellation on the left half of
    the circle; keep t*(2*tau+mu)*|xi|^2 moderate (<~ 10) for full
    float64 accuracy.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not t > 0.0:
        raise ValueError("t must be positive")
    if nodes < 16:
        raise ContourError(f"need at least 16 contour nodes, got {nodes}")
    center, default_radius = contour_circle(params, xi_norm_sq)
    r = default_radius if radius is None else float(radius)
    lo, hi = pole_locations(params, xi_norm_sq)
    if not (abs(lo - center) < r and abs(hi - center) < r):
        raise ContourError(
            f"circle (center={center:.6e}, radius={r:.6e}) does not enclose "
            f"poles {lo:.6e}, {hi:.6e}"
        )
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    lam = center + r * np.exp(1j * theta)
    integrand = np.exp(-t * lam) * _trace_formula(params, n, xi_norm_sq, lam)
    # d(lam) = i*r*e^{i theta} d(theta); the 1/(2*pi*i) prefactor cancels
    # everything except r/nodes.
    value = (r / nodes) * np.sum(integrand * np.exp(1j * theta))
    return float(value.real)
