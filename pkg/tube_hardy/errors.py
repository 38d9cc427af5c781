"""
Exception hierarchy for tube_hardy.

Every failure raised by the library derives from TubeHardyError and knows
which module raised it, so the CLI can embed it in a JSON error report.
"""

from typing import Any, Dict, Optional


class TubeHardyError(Exception):
    """Base class for all library errors"""

    module = "tube_hardy"

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        payload = {
            "error": self.message,
            "kind": type(self).__name__,
            "module": self.module,
        }
        if self.details:
            payload["details"] = self.details
        return payload


class ValidationError(TubeHardyError, ValueError):
    """Input rejected before any numerics ran"""


class NumericalError(TubeHardyError, ArithmeticError):
    """A computation could not meet its contract"""


# cone_geometry

class GeometryError(ValidationError):
    module = "cone_geometry"


class SingularGenerators(GeometryError):
    pass


class UnsupportedDimension(GeometryError):
    pass


class UnsupportedCone(GeometryError):
    pass


class DimensionMismatch(GeometryError):
    pass


class NotInInterior(GeometryError):
    pass


# gauge_weight

class GaugeError(ValidationError):
    module = "gauge_weight"


class OutsideDualCone(GaugeError):
    pass


class OutsideSpectralSet(GaugeError):
    pass


# cone_quadrature

class QuadratureError(NumericalError):
    module = "cone_quadrature"


class RuleRequestInvalid(ValidationError):
    module = "cone_quadrature"


class TargetUnreachable(QuadratureError):
    pass


class OscillationBudgetExceeded(QuadratureError):
    pass


class NonFiniteIntegrand(QuadratureError):
    pass


class NoConvergence(QuadratureError):
    pass


class RuleMismatch(QuadratureError):
    pass


# fourier_laplace / kernels

class FourierLaplaceError(ValidationError):
    module = "fourier_laplace"


class DegreeTooHigh(FourierLaplaceError):
    pass


class ParameterMismatch(FourierLaplaceError):
    pass


# kernels

class KernelError(ValidationError):
    module = "kernels"


class NotInHalfPlane(KernelError):
    pass


# boundary_decomposition

class DecompositionError(TubeHardyError):
    module = "boundary_decomposition"


class NonFiniteSamples(DecompositionError, ValueError):
    pass


class SpectrumOutsideCones(DecompositionError, ArithmeticError):
    pass


class WrongTube(DecompositionError, ValueError):
    pass


class GridInvalid(DecompositionError, ValueError):
    pass


# carleson

class GramIllConditioned(NumericalError):
    module = "carleson"


class MeasureInvalid(ValidationError):
    module = "carleson"


# operators

class OperatorError(ValidationError):
    module = "operators"


class SymbolOutsideDualCone(OperatorError):
    pass


class NotSelfMap(OperatorError):
    pass


# cli

class CommandFailure(TubeHardyError):
    """Error reported by the CLI together with its process exit code"""

    module = "cli"
    exit_code = 1

    @classmethod
    def wrap(cls, error: TubeHardyError) -> "CommandFailure":
        if isinstance(error, cls):
            return error
        failure = cls(error.message, details={"cause": error.to_dict()})
        failure.module = error.module
        return failure

    def to_dict(self) -> Dict[str, Any]:
        payload = super().to_dict()
        payload["exit_code"] = self.exit_code
        return payload


class ConfigInvalid(CommandFailure, ValidationError):
    exit_code = 2


class NumericalFailure(CommandFailure, NumericalError):
    exit_code = 3
