"""Exception and warning types raised by spinxfer."""


class SpinXferError(Exception):
    """Base class for all library errors."""


class EigenConvergenceError(SpinXferError):
    pass


class IsolationWarning(UserWarning):
    """The terminal doublet is not spectrally separated from the band."""


class ResonanceError(SpinXferError):
    pass


class MinimumOnBoundary(ResonanceError):
    """The doublet-gap minimum sits on the edge of the search window."""


class VanishingCoupling(ResonanceError):
    """The effective coupling is too small to resolve numerically."""


class InvalidTarget(SpinXferError, ValueError):
    pass


class StepUnderflow(SpinXferError):
    """The adaptive integrator asked for a step below the floor."""


class ConfigError(SpinXferError, ValueError):
    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")
