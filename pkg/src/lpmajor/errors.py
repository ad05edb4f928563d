"""Exception types raised by lpmajor."""


class LpMajorError(ValueError):
    pass


class StochasticityError(LpMajorError):
    """Coefficients fail a stochasticity condition.

    ``violation`` is the first offending :class:`~lpmajor.stochastic.Violation`.
    """

    def __init__(self, violation, message=None):
        self.violation = violation
        super().__init__(message or str(violation))


class NegativeEntryError(StochasticityError):
    pass


class RowSumError(StochasticityError):
    pass


class ColSumError(StochasticityError):
    pass


class NonSquareBlockError(StochasticityError):
    pass


class NotDoublyStochastic(LpMajorError):
    pass


class SupportOutsideWindow(LpMajorError):
    pass


class IncompatibleWindows(LpMajorError):
    pass


class NotInjectiveOnWindow(LpMajorError):
    pass


class OutsideInjectionDomain(LpMajorError):
    pass


class OverlappingImages(LpMajorError):
    """Two injections of a family share an image label."""

    def __init__(self, first, second, label):
        self.first, self.second, self.label = first, second, label
        super().__init__(f"injections {first} and {second} both hit label {label!r}")


class NotMajorizedInput(LpMajorError):
    pass


class SupportOutsideColumns(LpMajorError):
    pass


class StructureViolation(LpMajorError):
    def __init__(self, report):
        self.report = report
        super().__init__(str(report))


class ZeroVector(LpMajorError):
    pass


class PairNotMajorized(LpMajorError):
    def __init__(self, index, certificate):
        self.index = index
        self.certificate = certificate
        super().__init__(f"sample pair {index} is not a majorized pair")
