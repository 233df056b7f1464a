"""
Hierarquia de exceções do motor.
Cada classe carrega o exit code que a CLI devolve quando ela escapa de um comando.
"""
from typing import Any, Dict, Optional


class ExitCode:
    """Exit codes da CLI"""
    OK = 0
    VALIDATION = 1
    VERIFICATION = 2
    INTERNAL = 3


class EngineError(Exception):
    """Raiz de todas as falhas conhecidas do motor"""

    exit_code = ExitCode.INTERNAL

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = {k: v for k, v in details.items() if v is not None}

    def to_dict(self) -> Dict[str, Any]:
        """Representação usada nos relatórios e nos logs"""
        payload = {"error": self.message, "error_type": type(self).__name__}
        if self.details:
            payload["details"] = {k: str(v) for k, v in self.details.items()}
        return payload


# ---------------------------------------------------------------------------
# Álgebra exata
# ---------------------------------------------------------------------------

class AlgebraError(EngineError):
    exit_code = ExitCode.VALIDATION


class DivisionByZeroError(AlgebraError):
    pass


class UnknownSymbolError(AlgebraError):
    pass


class SymbolPoolExhaustedError(AlgebraError):
    exit_code = ExitCode.INTERNAL


class DiagonalPoleError(AlgebraError):
    """A substituição anulou o denominador identicamente"""
    exit_code = ExitCode.INTERNAL

    def __init__(self, message: str, binding: Optional[str] = None, **details: Any):
        super().__init__(message, binding=binding, **details)
        self.binding = binding


class IrrationalPoleError(AlgebraError):
    def __init__(self, message: str, factor: Optional[str] = None, **details: Any):
        super().__init__(message, factor=factor, **details)
        self.factor = factor


class WindowError(AlgebraError):
    exit_code = ExitCode.INTERNAL


# ---------------------------------------------------------------------------
# Curva espectral
# ---------------------------------------------------------------------------

class CurveValidationError(EngineError):
    """A curva viola uma hipótese da recursão"""
    exit_code = ExitCode.VALIDATION

    def __init__(self, message: str, hypothesis: Optional[str] = None, **details: Any):
        super().__init__(message, hypothesis=hypothesis, **details)
        self.hypothesis = hypothesis


class NonSimpleRamificationError(CurveValidationError):
    pass


class IrrationalRamificationError(CurveValidationError):
    pass


class CoincidentZerosError(CurveValidationError):
    pass


class SingularCurveError(CurveValidationError):
    pass


# ---------------------------------------------------------------------------
# Tabelas e motor
# ---------------------------------------------------------------------------

class MissingEntryError(EngineError):
    exit_code = ExitCode.VALIDATION

    def __init__(self, label, message: Optional[str] = None):
        g, m, n = label
        super().__init__(message or f"Missing table entry (g,m,n)=({g},{m},{n})", label=label)
        self.label = label


class PreconditionError(EngineError):
    exit_code = ExitCode.VALIDATION


class UnstableEntryError(PreconditionError):
    pass


class PrecisionCapExceededError(EngineError):
    exit_code = ExitCode.INTERNAL


class DeckSeriesError(EngineError):
    exit_code = ExitCode.INTERNAL


class PoleSplitError(EngineError):
    exit_code = ExitCode.INTERNAL


class PsiExtractionError(EngineError):
    exit_code = ExitCode.INTERNAL


class VerificationFailure(EngineError):
    """Uma identidade que deveria valer exatamente falhou"""
    exit_code = ExitCode.VERIFICATION

    def __init__(self, message: str, check: Optional[str] = None, **details: Any):
        super().__init__(message, check=check, **details)
        self.check = check
