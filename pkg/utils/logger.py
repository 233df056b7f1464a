"""
Logs estruturados do motor: um objeto JSON por linha em stderr.

stdout fica reservado para a saída da CLI. Cada evento é uma mensagem curta
em snake_case; os campos extras seguem como `extra` e o JsonFormatter do
python-json-logger monta a linha.
"""
import logging
import sys
import time
from contextlib import contextmanager
from typing import Any, Dict, Iterator, Optional, Tuple

from pythonjsonlogger import jsonlogger

from config.settings import RUNTIME_CONFIG


# Atributos do LogRecord e chaves já ocupadas na linha final
_TAKEN = set(vars(logging.LogRecord("", 0, "", 0, "", None, None))) | {
    "message", "asctime", "event", "level", "logger", "timestamp",
}


def event_formatter() -> jsonlogger.JsonFormatter:
    """timestamp, level, logger e event em toda linha; racionais e enums viram str"""
    return jsonlogger.JsonFormatter(
        "%(levelname)s %(name)s %(message)s",
        rename_fields={"levelname": "level", "name": "logger", "message": "event"},
        timestamp=True,
        json_default=str,
    )


def _extra(fields: Dict[str, Any]) -> Dict[str, Any]:
    return {(f"{k}_" if k in _TAKEN else k): v for k, v in fields.items() if v is not None}


class StructuredLogger:
    """Fachada sobre logging.Logger com eventos nomeados e campos livres"""

    def __init__(self, name: str = "omega_engine"):
        self.logger = logging.getLogger(name)
        self.logger.setLevel(RUNTIME_CONFIG["LOG_LEVEL"])
        self.logger.propagate = False
        if not self.logger.handlers:
            handler = logging.StreamHandler(sys.stderr)
            handler.setFormatter(event_formatter())
            self.logger.addHandler(handler)

    @property
    def name(self) -> str:
        return self.logger.name

    def log(self, level: int, event: str, /, **fields: Any):
        if self.logger.isEnabledFor(level):
            self.logger.log(level, event, extra=_extra(fields))

    def info(self, event: str, **fields: Any):
        self.log(logging.INFO, event, **fields)

    def warning(self, event: str, **fields: Any):
        self.log(logging.WARNING, event, **fields)

    def error(self, event: str, **fields: Any):
        self.log(logging.ERROR, event, **fields)

    def debug(self, event: str, **fields: Any):
        self.log(logging.DEBUG, event, **fields)

    def log_entry_computed(self, label: Tuple[int, int, int], formula: str,
                           duration: float, **fields: Any):
        """Uma entrada omega^(g)_{m,n} recém-calculada (nível DEBUG)"""
        g, m, n = label
        self.debug("entry_computed", g=g, m=m, n=n, formula=formula,
                   duration_seconds=round(duration, 6), **fields)

    def log_check(self, check: str, passed: bool, **fields: Any):
        """Resultado de uma verificação; falhas saem como WARNING"""
        if passed:
            self.info("check_passed", check=check, **fields)
        else:
            self.warning("check_failed", check=check, **fields)

    @contextmanager
    def execution_context(self, execution_id: str, operation: str, **fields: Any) -> Iterator[None]:
        """
        Envolve uma operação com <operation>_start e <operation>_success, ou
        <operation>_error com o tipo da exceção, que é relançada.
        """
        started = time.perf_counter()
        self.info(f"{operation}_start", execution_id=execution_id, **fields)
        try:
            yield
        except Exception as e:
            self.error(f"{operation}_error", execution_id=execution_id,
                       duration_seconds=round(time.perf_counter() - started, 6),
                       error=str(e), error_type=type(e).__name__, **fields)
            raise
        self.info(f"{operation}_success", execution_id=execution_id,
                  duration_seconds=round(time.perf_counter() - started, 6), **fields)

    @contextmanager
    def stage_context(self, execution_id: str, stage: str, **fields: Any) -> Iterator[None]:
        """Uma etapa dentro de um comando: eventos stage_<nome>_*"""
        with self.execution_context(execution_id, f"stage_{stage}", stage=stage, **fields):
            yield


logger = StructuredLogger()


def get_logger(name: Optional[str] = None) -> StructuredLogger:
    return StructuredLogger(name) if name else logger
