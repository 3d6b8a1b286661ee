"""Exception types shared across the package.

Every error carries a ``stage`` label so the CLI can emit structured
{stage, message, hint} reports.
"""


class ElastospecError(Exception):
    """Base class for validation-level failures."""

    stage = "general"
    hint = ""

    def __init__(self, message, hint=None):
        super().__init__(message)
        if hint is not None:
            self.hint = hint


class PoleProximityError(ElastospecError):
    """Resolvent parameter too close to a spectral pole of the symbol."""

    stage = "symbol"
    hint = "move lambda away from tau*|xi|^2 and (2*tau+mu)*|xi|^2"


class ContourError(ElastospecError):
    """Integration contour fails to enclose the symbol poles."""

    stage = "symbol"
    hint = "increase the contour radius so both poles are strictly inside"


class MeshError(ElastospecError):
    stage = "mesh"
    hint = "check domain parameters and target edge length"


class AssemblyError(ElastospecError):
    stage = "fem"
    hint = "refine the mesh; Dirichlet elimination removed every unknown"


class EigensolveError(ElastospecError):
    stage = "fem"
    hint = "adjust the shift sigma or increase the iteration budget"


class IncompleteSpectrumError(ElastospecError):
    """Eigenvalue count disagrees with the Weyl-law audit band."""

    stage = "oracle"
    hint = "tighten the root-scan grid or extend the search window"


class WindowError(ElastospecError):
    stage = "fit"
    hint = "compute more eigenvalues before fitting"


class FitError(ElastospecError):
    stage = "fit"
    hint = "widen the time window or add samples"


class ConsistencyError(ElastospecError):
    """Metadata on a spectrum disagrees with the requested operation."""

    stage = "fit"
    hint = "check bc / material parameters against the spectrum file"


class SchemaError(ElastospecError):
    stage = "io"
    hint = "regenerate the artifact with this version of the tool"
