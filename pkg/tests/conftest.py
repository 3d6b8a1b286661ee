import pytest

from elastospec.kernel_asymptotics import BoundaryCondition
from elastospec.materials import LameParameters


@pytest.fixture(scope="session")
def flagship_params():
    return LameParameters(1.0, 1.0)


@pytest.fixture(scope="session")
def disk_oracle_spectrum(flagship_params):
    """Clamped-disk spectrum used by the recovery fixtures (~630 modes)."""
    from elastospec.analytic_oracles import disk_dirichlet_spectrum

    return disk_dirichlet_spectrum(flagship_params, 1.0, 2000.0)


@pytest.fixture(scope="session")
def disk_oracle_deep(flagship_params):
    """Deep disk spectrum for counting-function checks (~5200 modes)."""
    from elastospec.analytic_oracles import disk_dirichlet_spectrum

    return disk_dirichlet_spectrum(flagship_params, 1.0, 16000.0)


@pytest.fixture(scope="session")
def interval_params():
    return LameParameters(1.0, -0.5)  # 2*tau + mu = 3/2


@pytest.fixture(scope="session")
def interval_dirichlet(interval_params):
    import math

    from elastospec.analytic_oracles import interval_spectrum_1d

    return interval_spectrum_1d(
        interval_params, math.pi, BoundaryCondition.DIRICHLET, 2000
    )


@pytest.fixture(scope="session")
def interval_neumann(interval_params):
    import math

    from elastospec.analytic_oracles import interval_spectrum_1d

    return interval_spectrum_1d(
        interval_params, math.pi, BoundaryCondition.NEUMANN, 2000
    )
