"""Exception types raised by the OPO noise model."""


class OPOError(Exception):
    """Base class for every error raised by this package."""


class ParameterOutOfRange(OPOError, ValueError):
    pass


class FrequencyMismatch(OPOError, ValueError):
    pass


class BelowThreshold(OPOError, ValueError):
    pass


class NoConvergence(OPOError, RuntimeError):
    pass


class InconsistentState(OPOError, ValueError):
    pass


class SingularSystem(OPOError, ArithmeticError):
    """The linearized system cannot be inverted at the requested frequency."""


class DivergentVariance(OPOError, ArithmeticError):
    """A needed covariance entry is divergent (phase diffusion / critical slowing)."""


class ZeroVariance(OPOError, ArithmeticError):
    pass
