"""Exception hierarchy shared by all solver modules."""


class CVPError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(CVPError):
    """Input data violates a structural requirement."""


class NotSymmetric(ValidationError):
    def __init__(self, i: int, j: int):
        super().__init__(f"lagrangian is not symmetric at ({i}, {j})")
        self.index = (i, j)


class NegativeEntry(ValidationError):
    def __init__(self, i: int, j: int):
        super().__init__(f"lagrangian has a negative entry at ({i}, {j})")
        self.index = (i, j)


class NonpositiveDiagonal(ValidationError):
    def __init__(self, i: int):
        super().__init__(f"lagrangian diagonal entry ({i}, {i}) is not positive")
        self.index = (i, i)


class DimensionMismatch(ValidationError):
    pass


class NonpositiveLambda(ValidationError):
    pass


class COutOfRange(ValidationError):
    pass


class TooManyPoints(CVPError):
    def __init__(self, n: int, cap: int):
        super().__init__(f"{n} points exceed the enumeration cap of {cap}")
        self.n = n
        self.cap = cap


class NotConverged(CVPError):
    def __init__(self, message: str, record=None):
        super().__init__(message)
        self.record = record


class NuZero(CVPError):
    pass


class NuNotInK(CVPError):
    pass


class NotAdmissible(CVPError):
    def __init__(self, report=None):
        super().__init__("initial data is not admissible")
        self.report = report


class SingularSupportMatrix(CVPError):
    pass


class IndefiniteSupportMatrix(CVPError):
    pass


class DoesNotEncloseInitialData(CVPError):
    pass


class NoDependentSet(CVPError):
    pass


class NoGerms(CVPError):
    pass


class ParseError(CVPError):
    """Malformed problem file; carries a 1-based line/column and field path."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None, path: str = ""):
        where = ""
        if line is not None:
            where = f"line {line}, column {column}: "
        field = f" [{path}]" if path else ""
        super().__init__(f"{where}{message}{field}")
        self.line = line
        self.column = column
        self.path = path
