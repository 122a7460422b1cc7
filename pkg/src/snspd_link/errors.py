"""Exception hierarchy.

The command line front end maps these onto exit codes: configuration
problems exit 2, numerical failures exit 3, and data-contract violations
exit 4.
"""


class SnspdLinkError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(SnspdLinkError):
    """Configuration file is missing, malformed, or violates the schema."""


class DataContractError(SnspdLinkError):
    """Input data violates a documented contract."""


class NumericalError(SnspdLinkError):
    """A numerical routine failed to produce a trustworthy result."""


class OutOfRangeError(DataContractError):
    """A query point lies outside the tabulated or simulated range."""


class InsufficientPointsError(DataContractError):
    """Too few data points for the requested analysis."""


class BiasNotFoundError(DataContractError):
    """Requested bias current is not present in the trace."""


class MissingAlignedPointError(DataContractError):
    """Rotation sweep lacks the zero-angle reference entry."""


class NegativeLossError(DataContractError):
    """Loss-budget arithmetic produced a negative insertion loss."""


class DegenerateDenominatorError(DataContractError):
    """Normalization denominator vanished (for example a lossless stack)."""


class DegenerateFitError(DataContractError):
    """Fit input carries no usable variation in the independent variable."""


class DivideByZeroError(DataContractError):
    """A ratio against a zero count rate that cannot be floored."""


class NoSwitchError(DataContractError):
    """IV trace never crosses the switching threshold."""


class NoGuidedModeError(NumericalError):
    """No eigenvalue above the cladding light line."""


class ConvergenceFailureError(NumericalError):
    """Eigenvalue iteration did not converge to the requested residual."""


class NonConvergenceError(NumericalError):
    """Slice-doubling refinement exhausted its budget without converging."""


class FitFailureError(NumericalError):
    """Least-squares fit failed; the message carries residual diagnostics."""
