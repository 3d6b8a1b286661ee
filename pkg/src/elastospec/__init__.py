"""Spectral geometry of the linear elasticity operator.

Eigenvalue computation (exact, semi-analytic and finite-element), symbol
calculus with independent numerical oracles, and recovery of a body's
volume and boundary area from its vibration spectrum alone.
"""

import os as _os

# must happen before the first numpy import for BLAS pools to honor it
if "ELASTOSPEC_THREADS" in _os.environ:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _os.environ["ELASTOSPEC_THREADS"])

from .kernel_asymptotics import (
    BoundaryCondition,
    GeometricData,
    HeatTraceCoefficients,
    boundary_coefficient,
    heat_trace_coefficients,
    interior_coefficient,
    isoperimetric_audit,
    recover_geometry,
    theoretical_trace,
    weyl_count_prediction,
)
from .materials import LameParameters
from .spectra import Spectrum

__all__ = [
    "BoundaryCondition",
    "GeometricData",
    "HeatTraceCoefficients",
    "LameParameters",
    "Spectrum",
    "boundary_coefficient",
    "heat_trace_coefficients",
    "interior_coefficient",
    "isoperimetric_audit",
    "recover_geometry",
    "theoretical_trace",
    "weyl_count_prediction",
]

__version__ = "0.1.0"
