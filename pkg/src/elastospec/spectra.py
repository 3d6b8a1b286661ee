"""Eigenvalue lists with boundary-condition and provenance metadata."""

from dataclasses import dataclass, field, replace

import numpy as np

from .kernel_asymptotics import BoundaryCondition
from .materials import LameParameters
from .mesh_geometry import Domain2D

__all__ = ["Spectrum", "PROVENANCE_TYPES"]

PROVENANCE_TYPES = ("fem", "analytic_interval", "analytic_disk", "external")


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues of the elastic operator on some domain.

    Eigenvalues are listed with multiplicity. Dirichlet spectra start
    strictly above zero; Neumann spectra start at zero (rigid modes).
    ``provenance`` is a dict whose "type" key is one of
    ``PROVENANCE_TYPES``; FEM provenance additionally carries mesh
    metadata and an ``extrapolated`` flag.
    """

    bc: BoundaryCondition
    params: LameParameters
    dim: int
    eigenvalues: np.ndarray
    provenance: dict
    domain_meta: Domain2D | None = field(default=None)

    def __post_init__(self):
        eig = np.asarray(self.eigenvalues, dtype=float)
        if eig.ndim != 1 or eig.size == 0:
            raise ValueError("eigenvalues must be a non-empty 1-D array")
        object.__setattr__(self, "eigenvalues", eig)
        if np.any(np.diff(eig) < 0.0):
            raise ValueError("eigenvalues must be ascending")
        if np.any(eig < 0.0):
            raise ValueError("eigenvalues must be non-negative")
        scale = max(1.0, float(eig[-1]))
        if self.bc is BoundaryCondition.DIRICHLET:
            if eig[0] <= 0.0:
                raise ValueError("Dirichlet spectra must start strictly above 0")
        else:
            if eig[0] > 1e-8 * scale:
                raise ValueError(
                    f"Neumann spectra must start at 0 (got lambda_1={eig[0]:.3e})"
                )
        ptype = self.provenance.get("type")
        if ptype not in PROVENANCE_TYPES:
            raise ValueError(f"unknown provenance type {ptype!r}")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")

    @property
    def count(self) -> int:
        return int(self.eigenvalues.size)

    def truncated(self, k: int) -> "Spectrum":
        """First k eigenvalues, keeping all metadata."""
        if not 1 <= k <= self.count:
            raise ValueError(f"k must be in [1, {self.count}]")
        return replace(self, eigenvalues=self.eigenvalues[:k].copy())

    def counting_function(self, eta: float) -> int:
        """N(eta): number of eigenvalues <= eta, with multiplicity."""
        return int(np.searchsorted(self.eigenvalues, eta, side="right"))
