"""
Configurações centralizadas para o motor de recursão topológica.
Define limites de precisão, convenções de sinal e parâmetros de execução.
"""
import os
from dataclasses import dataclass, asdict
from typing import Dict, Any
from enum import Enum


ENGINE_VERSION = "1.3.0"


class Side(str, Enum):
    """Lado de uma ramificação: zeros de dx ou zeros de dy"""
    X = "x"
    Y = "y"


class Direction(str, Enum):
    """Direção de um passo de troca x-y"""
    X_TO_Y = "x_to_y"
    Y_TO_X = "y_to_x"


class Method(str, Enum):
    """Fórmulas disponíveis para diferenciais mistas"""
    SIMPLE = "simple"
    STANDARD = "standard"
    BOTH = "both"
    GRAPH = "graph"


class OperatorForm(str, Enum):
    """Normalização dos operadores: por dx, dy (simples) ou por dX = -dx/x, dY = -dy/y (padrão)"""
    SIMPLE = "simple"
    STANDARD = "standard"


class CurveFamily(str, Enum):
    """Curvas com y = z e peso de vértice em forma fechada"""
    AIRY = "airy"
    WITTEN = "witten"
    HYPERMAP = "hypermap"
    THETA = "theta"


class OutputFormat(str, Enum):
    """Formatos de saída da CLI"""
    PRETTY = "pretty"
    JSON = "json"


class Command(str, Enum):
    """Comandos da CLI"""
    TR = "tr"
    SWAP = "swap"
    MIXED = "mixed"
    CLOSED_YZ = "closed-yz"
    PSI = "psi"
    VERIFY = "verify"


class Formula(str, Enum):
    """Identificadores de proveniência gravados em cada resultado"""
    CLASSICAL_TR = "classical-tr"
    SIMPLE_RECURSION = "simple-recursion"
    STANDARD_RECURSION = "standard-recursion"
    GRAPH_SUM = "graph-sum"
    CLOSED_YZ = "closed-yz"
    POLE_SPLITTING = "pole-splitting"
    UNSTABLE = "unstable-convention"
    OVERRIDE = "override"


@dataclass(frozen=True)
class ConventionFlags:
    """Convenções de sinal que entram na chave do cache"""
    omega_01: str = "-y*dx"
    omega_10_dual: str = "-x*dy"
    bergman: str = "dz1*dz2/(z1-z2)**2"
    mixed_11: str = "-B"

    def to_dict(self) -> Dict[str, str]:
        return asdict(self)


CONVENTIONS = ConventionFlags()


class EngineConfig:
    """Limites numéricos do motor"""

    # Tamanho do conjunto fixo de geradores z1..zN do corpo de frações
    MAX_SYMBOLS = int(os.getenv("MAX_SYMBOLS", "16"))

    # Séries de deck: ordem máxima antes de desistir do alargamento automático
    DECK_ORDER_CAP = int(os.getenv("DECK_ORDER_CAP", "96"))
    DECK_ORDER_MIN = 6
    LAURENT_WIDEN_LIMIT = int(os.getenv("LAURENT_WIDEN_LIMIT", "6"))

    # Paralelismo dos termos independentes
    MAX_WORKERS = int(os.getenv("MAX_WORKERS", "4"))

    # Sondas racionais para variáveis espectadoras nos testes de equações de laço
    PROBE_SEED = int(os.getenv("PROBE_SEED", "20240917"))
    PROBE_SETS = int(os.getenv("PROBE_SETS", "3"))

    CACHE_DIR = os.getenv("CACHE_DIR", ".omega_cache")
    CURVES_DIR = os.getenv("CURVES_DIR", os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "curves"))

    @classmethod
    def initial_deck_order(cls, pole_bound: int) -> int:
        """Ordem inicial da série de deck para um integrando com polo de ordem pole_bound"""
        return max(cls.DECK_ORDER_MIN, 2 * pole_bound + 4)

    @classmethod
    def as_dict(cls) -> Dict[str, Any]:
        """Retorna os limites ativos (usado em logs e relatórios)"""
        return {
            "max_symbols": cls.MAX_SYMBOLS,
            "deck_order_cap": cls.DECK_ORDER_CAP,
            "laurent_widen_limit": cls.LAURENT_WIDEN_LIMIT,
            "max_workers": cls.MAX_WORKERS,
            "probe_seed": cls.PROBE_SEED,
            "probe_sets": cls.PROBE_SETS,
        }


# Configurações de execução
RUNTIME_CONFIG = {
    "LOG_LEVEL": os.getenv("LOG_LEVEL", "INFO"),
    "LOG_FORMAT": os.getenv("LOG_FORMAT", "text"),
    "CACHE_DIR": EngineConfig.CACHE_DIR,
}

# Configurações de logging
LOGGING_CONFIG = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "default": {
            "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
        },
        "json": {
            "()": "pythonjsonlogger.jsonlogger.JsonFormatter",
            "format": "%(asctime)s %(name)s %(levelname)s %(message)s"
        }
    },
    "handlers": {
        "default": {
            "class": "logging.StreamHandler",
            "level": RUNTIME_CONFIG["LOG_LEVEL"],
            "formatter": "json" if RUNTIME_CONFIG["LOG_FORMAT"] == "json" else "default",
            "stream": "ext://sys.stderr"
        }
    },
    "loggers": {
        "sympy": {
            "level": "WARNING",
            "handlers": ["default"],
            "propagate": False
        }
    }
}
