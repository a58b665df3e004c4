"""Exception hierarchy shared by all modules."""


class RegfmError(Exception):
    """Base class for every error raised by the package."""


class NotClosed(RegfmError):
    """A one-form handed to the integrator is not closed."""

    def __init__(self, j, k, difference):
        self.pair = (j, k)
        self.difference = difference
        super().__init__(
            f"one-form not closed: d_{j + 1} w_{k + 1} - d_{k + 1} w_{j + 1} = {difference}"
        )


class SingularPivot(RegfmError):
    """A leading block component vanishes at the expansion point."""


class AssumptionUnmet(RegfmError):
    """Regularity hypotheses fail; ``result`` carries the partial (one-way) outcome."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class PreconditionFailed(RegfmError):
    pass


class NonUnique(RegfmError):
    pass


class Inconsistent(RegfmError):
    pass


class DegenerateVelocities(RegfmError):
    pass


class CflViolation(RegfmError):
    pass


class BlowupDetected(RegfmError):
    pass


class ConfigError(RegfmError):
    """Bad job configuration; ``field`` names the offending entry when known."""

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)
