"""Exception hierarchy shared by every module in the package."""


class CFusionError(ValueError):
    """Base class for all domain errors raised by :mod:`cfusion`."""


class AllVectorsNumericallyZero(CFusionError):
    pass


class NotHermitian(CFusionError):
    pass


class NotPositiveDefinite(CFusionError):
    pass


class SingularOperator(CFusionError):
    pass


class ZeroVector(CFusionError):
    pass


class DimensionMismatch(CFusionError):
    pass


class ShapeMismatch(CFusionError):
    pass


class NotAFrame(CFusionError):
    pass


class NotADual(CFusionError):
    pass


class FiberViolation(CFusionError):
    pass


class ConstraintViolation(CFusionError):
    pass


class ScenarioError(CFusionError):
    """Base for problems reading a scenario file."""


class ParseError(ScenarioError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class SchemaError(ScenarioError):
    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class InvariantError(ScenarioError):
    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)
