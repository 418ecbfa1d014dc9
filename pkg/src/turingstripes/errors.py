"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class TuringStripesError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(TuringStripesError):
    """Invalid user input (system definition or run configuration)."""


class NumericalFailure(TuringStripesError):
    """A numerical procedure did not produce a trustworthy result."""


# -- model validation ---------------------------------------------------------

class NonPositiveDiffusion(ConfigError):
    pass


class AsymmetricTensorBeyondSymmetrization(TuringStripesError):
    """Internal error: symmetrization changed the diagonal evaluation."""


class InconsistentPolynomialTensor(ConfigError):
    pass


class NoTuringWavenumber(ConfigError):
    pass


class ConditionFailed(ConfigError):
    """A Turing condition does not hold.

    Attributes
    ----------
    which : int
        Index (1, 2 or 3) of the failing condition.
    witness : float
        Value that demonstrates the failure.
    """

    def __init__(self, which: int, witness: float, message: str = ""):
        self.which = which
        self.witness = witness
        super().__init__(message or f"Turing condition ({which}) fails, witness={witness!r}")


class DegenerateKernelChart(ConfigError):
    pass


class LambdaMZero(ConfigError):
    pass


# -- coefficients -------------------------------------------------------------

class RhsNotInRange(NumericalFailure):
    pass


class SingularAuxiliaryOperator(ConfigError):
    def __init__(self, which: str):
        self.which = which
        super().__init__(f"auxiliary operator {which} is singular (non-generic system)")


class SupercriticalityViolated(ConfigError):
    def __init__(self, rho_nl: float):
        self.rho_nl = rho_nl
        super().__init__(f"rho_nl = {rho_nl!r} >= 0: stripe bifurcation is not supercritical")


# -- blocks / boundaries --------------------------------------------------------

class InconsistentAmplitude(TuringStripesError):
    pass


class NoStripe(TuringStripesError):
    """No stripe exists at the requested parameters (below the bifurcation surface)."""


class ThetaOutOfRange(ConfigError):
    pass


class GridTooFine(ConfigError):
    pass


# -- oracle ---------------------------------------------------------------------

class NewtonDiverged(NumericalFailure):
    def __init__(self, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(f"Newton failed after {iterations} iterations, residual {residual:.3e}")


class TruncationInsufficient(NumericalFailure):
    pass


class EigensolveFailure(NumericalFailure):
    pass


class MatchingFailure(NumericalFailure):
    pass


class CalibrationAmbiguous(NumericalFailure):
    pass


# -- I/O ------------------------------------------------------------------------

class ParseError(ConfigError):
    def __init__(self, line: int, column: int, message: str):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class UnknownKey(ConfigError):
    pass


class RangeError(ConfigError):
    pass
