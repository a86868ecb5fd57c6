"""Exception hierarchy shared by all modules."""


class SpheroError(Exception):
    """Base class for every error raised by spherodeck."""


class InvalidInput(SpheroError, ValueError):
    pass


class InvalidPresentation(SpheroError):
    pass


class NotReductive(SpheroError):
    pass


class NotSplitStructure(SpheroError):
    pass


class ResourceLimit(SpheroError):
    pass


class SolverFailure(SpheroError):
    """A numerical decomposition did not reach its residual tolerance.

    ``diagnostics`` carries whatever the solver knew when it gave up.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ToleranceViolation(SpheroError):
    pass


class SpanDeficient(SpheroError):
    def __init__(self, message, a_hw=None):
        super().__init__(message)
        self.a_hw = a_hw


class NumericalInstability(SpheroError):
    pass


class QuadratureFailure(SpheroError):
    pass


class SchemaError(SpheroError):
    def __init__(self, message, pointer=""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer


class ValidationError(SpheroError):
    """Collects every invariant failure found while loading a space."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
