"""Exception types raised by the simulator."""


class EPSenseError(Exception):
    """Base class for all package errors."""


class InvalidParams(EPSenseError, ValueError):
    pass


class SqueezeDiverges(InvalidParams):
    """Parametric drive reached the mechanical frequency, r -> infinity."""


class NonPositiveRate(InvalidParams):
    pass


class NonPositiveMass(InvalidParams):
    pass


class NoConvergence(EPSenseError):
    def __init__(self, max_iter: int, residual: float):
        super().__init__(f"no convergence after {max_iter} iterations (residual {residual:.3e})")
        self.max_iter = max_iter
        self.residual = residual


class NoEPInBracket(EPSenseError):
    pass


class ZeroPerturbation(EPSenseError, ValueError):
    pass


class PoleHit(EPSenseError):
    def __init__(self, omega: float):
        super().__init__(f"scattering denominator vanishes at omega={omega!r}")
        self.omega = omega


class AmbiguousBranch(EPSenseError):
    """Fewer than two eigenvectors are mostly mechanical (strong coupling)."""


class ConfigError(EPSenseError, ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
