"""Exception taxonomy shared by all modules.

The CLI maps these onto its exit-code contract: user/input problems exit
with 2, infeasible requests (including a non-stabilizing controller) with
3, and numerical failures with 4.
"""


class CtredError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(CtredError):
    """Matrix or system dimensions are incompatible."""


class NonFiniteError(CtredError):
    """An input or result contains NaN or infinity."""


class UnsupportedError(CtredError):
    """The operation is not defined for this kind of system (e.g. MIMO)."""


class StabilityError(CtredError):
    """A stability precondition is violated."""


class AxisPoleError(CtredError):
    """An eigenvalue lies on (or too close to) the imaginary axis."""


class SeparationError(CtredError):
    """Spectra are too close for a well-conditioned decoupling."""


class ReorderingError(CtredError):
    """Eigenvalue reordering of a Schur form failed."""


class ConvergenceError(CtredError):
    """An iterative or direct solve did not reach the required residual."""


class NoStabilizingSolutionError(CtredError):
    """The Riccati equation has no stabilizing solution."""


class MinimalityError(CtredError):
    """The realization is not minimal (or numerically too close to it)."""


class PartitionTieError(CtredError):
    """Hankel singular values tie at the requested truncation split."""


class InfeasibleOrderError(CtredError):
    """The requested reduced order cannot be realized."""


class ZeroModeError(CtredError):
    """A mode with (near-)zero eigenvalue cannot be ranked or removed."""


class NotStabilizingError(CtredError):
    """The controller does not internally stabilize the plant."""


class WrongCertificateError(CtredError):
    """The requested certificate does not apply; a different one does."""


class RadiusError(CtredError):
    """The probe radius violates its separation hypothesis."""


class SynthesisError(CtredError):
    """Random instance generation failed to produce a stabilizing pair."""
