"""Exception hierarchy shared by every module of the package."""


class MiopError(Exception):
    """Base class for all errors raised by miop."""


class PoleError(MiopError):
    pass


class DivergenceError(MiopError):
    pass


class DomainError(MiopError):
    pass


class NegativeRadicandError(MiopError):
    pass


class IllConditionedError(MiopError):
    pass


class DegreeMismatchError(MiopError):
    pass


class InterpolationError(DegreeMismatchError):
    """Re-interpolated operator output is not a polynomial of the expected degree."""


class InconclusiveError(MiopError):
    pass


class BoundaryZeroError(MiopError):
    pass


class SignError(MiopError):
    pass


class RangeError(MiopError):
    pass


class ZeroDenominatorError(MiopError):
    pass


class NodeSingularError(MiopError):
    pass


class NonConvergedError(MiopError):
    pass


class ValidationError(MiopError):
    """A deletion set or parameter vector failed admissibility checks."""

    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(report.failures) or "invalid input")


class DegenerateSystemError(DegreeMismatchError):
    """The determinant defining Xi_D vanishes identically (e.g. coinciding virtual states)."""
