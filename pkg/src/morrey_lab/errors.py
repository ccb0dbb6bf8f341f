"""Exception hierarchy shared by all morrey_lab modules."""


class MorreyLabError(Exception):
    """Base class for every error raised by the package."""


class InvalidRangeError(MorreyLabError, ValueError):
    pass


class InvalidCountError(MorreyLabError, ValueError):
    pass


class MisalignedFunctionError(MorreyLabError, ValueError):
    pass


class DegenerateInputError(MorreyLabError, ValueError):
    pass


class UnknownFamilyError(MorreyLabError, ValueError):
    pass


class InvalidParamsError(MorreyLabError, ValueError):
    pass


class IndexOutOfRangeError(MorreyLabError, IndexError):
    pass


class EmptyRadiiError(MorreyLabError, ValueError):
    pass


class OutOfDomainError(MorreyLabError, ValueError):
    pass


class TableTooCoarseError(MorreyLabError, ValueError):
    pass


class UnsupportedVariantError(MorreyLabError, ValueError):
    pass


class WeightSingularAtNodeError(MorreyLabError, ValueError):
    pass


class NonIntegrableInputError(MorreyLabError, ValueError):
    """A weighted integral diverges at the sampled resolution."""


class EvaluationAtEndpointError(MorreyLabError, ValueError):
    pass


class DegenerateCurveError(MorreyLabError, ValueError):
    pass


class ClassMismatchError(MorreyLabError, ValueError):
    """The weight fails the class precondition of a kernel estimate."""


class CurveFileError(MorreyLabError, ValueError):
    pass


class WeightTableError(MorreyLabError, ValueError):
    pass


class ConfigParseError(MorreyLabError, ValueError):
    def __init__(self, line, reason):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class ConfigValidationError(MorreyLabError, ValueError):
    def __init__(self, key, constraint):
        self.key = key
        self.constraint = constraint
        super().__init__(f"{key}: {constraint}")


class EmptyReportListError(MorreyLabError, ValueError):
    pass
