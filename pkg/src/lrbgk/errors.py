"""Exception types shared across the solver."""


class ConfigurationError(ValueError):
    """Invalid configuration: bad dimensions, unsupported options, unresolved boundaries."""


class NumericalError(RuntimeError):
    """A dense linear-algebra kernel (QR/SVD) failed on otherwise valid inputs."""


class SolverError(RuntimeError):
    """A nonlinear solve (Newton) failed to converge or produced unphysical iterates."""


class StepError(RuntimeError):
    """A time step could not be completed; carries the offending node coordinates."""
