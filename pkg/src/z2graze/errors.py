"""Exception hierarchy.

Configuration problems and numerical failures are kept apart so that the
command-line runner can map them onto distinct exit codes.
"""


class Z2GrazeError(Exception):
    """Base class for all errors raised by the package."""

    #: short machine-readable name used in JSON error reports
    code = "error"

    def __init__(self, message="", **details):
        super().__init__(message)
        self.details = details

    def to_dict(self):
        out = {"error": self.code, "message": str(self)}
        if self.details:
            out["details"] = self.details
        return out


class ConfigError(Z2GrazeError):
    code = "ConfigError"


class NumericalError(Z2GrazeError):
    code = "NumericalError"


class AmbiguousClassification(NumericalError):
    code = "AmbiguousClassification"


class DivisionDegenerate(NumericalError):
    code = "DivisionDegenerate"


class MaxEventsExceeded(NumericalError):
    code = "MaxEventsExceeded"


class StepSizeUnderflow(NumericalError):
    code = "StepSizeUnderflow"


class NoHit(NumericalError):
    code = "NoHit"


class NoReturn(NoHit):
    code = "NoReturn"


class NotGrazing(NumericalError):
    code = "NotGrazing"


class HyperbolicityViolated(NumericalError):
    code = "HyperbolicityViolated"


class NoConvergence(NumericalError):
    code = "NoConvergence"


class NoCycle(NoConvergence):
    code = "NoCycle"


class NoBracket(NumericalError):
    code = "NoBracket"


class EventNotBracketed(NoBracket):
    code = "EventNotBracketed"


class IllConditioned(NumericalError):
    code = "IllConditioned"


class InconsistentDetection(NumericalError):
    code = "InconsistentDetection"


class RegionMismatch(NumericalError):
    code = "RegionMismatch"
