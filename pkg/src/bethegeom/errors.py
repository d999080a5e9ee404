"""Exception hierarchy shared by every module."""


class BetheGeomError(Exception):
    """Base class for all package errors."""


class DegenerateFactor(BetheGeomError):
    pass


class ZeroConstantTerm(BetheGeomError):
    pass


class InsufficientSamples(BetheGeomError):
    pass


class IndexOutOfRange(BetheGeomError, IndexError):
    pass


class InvariantViolation(BetheGeomError, ValueError):
    """A parameter set sits on an excluded (non-generic) locus."""


class InvalidWeight(BetheGeomError, ValueError):
    pass


class ZeroSpectralParameter(BetheGeomError, ValueError):
    pass


class SpectralParameterAtPole(BetheGeomError, ValueError):
    pass


class RootAtPole(BetheGeomError, ValueError):
    pass


class CoincidentRoots(BetheGeomError, ValueError):
    pass


class EvaluationAtRoot(BetheGeomError, ValueError):
    pass


class ResonantRatio(BetheGeomError, ValueError):
    pass


class SingularDenominator(BetheGeomError, ZeroDivisionError):
    pass


class PoleCollision(BetheGeomError, ValueError):
    pass


class PathDivergence(BetheGeomError):
    pass


class PathCollision(BetheGeomError):
    pass


class SingularJacobian(BetheGeomError):
    pass


class ExtrapolationDiverged(BetheGeomError):
    pass


class TruncationMismatch(BetheGeomError, ValueError):
    pass


class ZeroTwist(BetheGeomError, ValueError):
    pass


class NoPolynomialSolution(BetheGeomError):
    pass


class IllConditioned(BetheGeomError):
    pass


class PoleAtEvaluation(BetheGeomError, ValueError):
    pass


class SingularGauge(BetheGeomError, ValueError):
    pass


class InexactDivision(BetheGeomError):
    pass


class NewtonDiverged(BetheGeomError):
    pass


class CoincidentCoordinates(BetheGeomError, ValueError):
    pass
