"""Material constants of isotropic linear elasticity."""

from dataclasses import dataclass


@dataclass(frozen=True)
class LameParameters:
    """Admissible pair of elastic moduli.

    Ellipticity of the operator -tau*Lap - (tau+mu)*grad(div) requires
    tau > 0 and tau + mu > 0, which makes the two wave-speed factors
    tau and 2*tau + mu distinct and positive.
    """

    tau: float
    mu: float

    def __post_init__(self):
        if not (self.tau > 0.0):
            raise ValueError(f"tau must be positive, got {self.tau}")
        if not (self.tau + self.mu > 0.0):
            raise ValueError(
                f"tau + mu must be positive, got tau={self.tau}, mu={self.mu}"
            )

    @property
    def shear_speed_sq(self) -> float:
        """Factor of the (n-1)-fold transverse eigenvalue family, tau."""
        return self.tau

    @property
    def pressure_speed_sq(self) -> float:
        """Factor of the longitudinal eigenvalue family, 2*tau + mu."""
        return 2.0 * self.tau + self.mu

    def scaled(self, s: float) -> "LameParameters":
        return LameParameters(s * self.tau, s * self.mu)
