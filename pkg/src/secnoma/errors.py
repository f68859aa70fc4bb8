"""Exception types shared across the package."""


class SecnomaError(Exception):
    """Base class for all package-specific errors."""


class DegenerateChannelError(SecnomaError):
    """Raised when two channel vectors are (near-)parallel and no null-space
    basis of the required dimension can be formed reliably."""


class InfeasibleConfigError(SecnomaError):
    """Raised when the QoS constraints cannot be met at the configured SNRs.

    ``pmin`` carries the minimum SNR multiplier that would make the scenario
    feasible (``> 1`` means the configured power is insufficient).
    """

    def __init__(self, message: str, pmin: float | None = None):
        super().__init__(message)
        self.pmin = pmin


class DataQualityError(SecnomaError):
    """Raised when too many Monte Carlo trials had to be rejected."""
