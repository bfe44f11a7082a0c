"""Exception hierarchy shared by all subpackages."""


class MorphoflightError(Exception):
    pass


class InfeasibleDisplacement(MorphoflightError, ValueError):
    """Linear displacement has no solution on the operating branch."""


class NonConvergence(MorphoflightError, RuntimeError):
    pass


class EulerSingularity(MorphoflightError, FloatingPointError):
    pass


class NoCriticalAngle(MorphoflightError, ValueError):
    pass


class InfeasibleMargin(MorphoflightError, ValueError):
    pass


class ParseError(MorphoflightError, ValueError):
    pass


class NonRectangularGrid(ParseError):
    pass


class NonPositiveRatio(ParseError):
    pass


class MaxIterations(MorphoflightError, RuntimeError):
    pass


class NumericalBreakdown(MorphoflightError, ArithmeticError):
    pass


class SolverFailure(MorphoflightError, RuntimeError):
    pass


class SimDiverged(MorphoflightError, FloatingPointError):
    pass


class ScenarioInvalid(MorphoflightError, ValueError):
    pass


class NoTouchdown(MorphoflightError, LookupError):
    pass


class UnknownParameter(MorphoflightError, KeyError):
    pass
