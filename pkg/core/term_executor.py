"""
Term Executor - mapa paralelo de termos independentes com redução determinística.
"""
import traceback
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Any, Callable, List, Optional, Sequence, TypeVar

from config.settings import EngineConfig
from utils.logger import get_logger


logger = get_logger("term_executor")

T = TypeVar("T")
R = TypeVar("R")


class TermExecutor:
    """Executor de termos (pontos de ramificação, grafos, partições)"""

    def __init__(self, max_workers: Optional[int] = None):
        """
        Inicializa o executor.

        Args:
            max_workers: Número máximo de threads; 1 executa em linha
        """
        self.max_workers = max_workers or EngineConfig.MAX_WORKERS
        self.logger = logger

    def map(self, fn: Callable[[T], R], items: Sequence[T], label: str = "terms") -> List[R]:
        """
        Aplica fn a cada item e devolve os resultados na ordem de submissão.

        As exceções de qualquer termo são relançadas depois de logadas.
        """
        items = list(items)
        if self.max_workers == 1 or len(items) <= 1:
            return [fn(item) for item in items]

        results: List[Any] = [None] * len(items)
        with ThreadPoolExecutor(max_workers=min(len(items), self.max_workers)) as executor:
            future_to_index = {executor.submit(fn, item): i for i, item in enumerate(items)}

            for future in as_completed(future_to_index):
                index = future_to_index[future]
                try:
                    results[index] = future.result()
                except Exception as e:
                    self.logger.error(
                        "parallel_term_exception",
                        label=label,
                        index=index,
                        error=str(e),
                        traceback=traceback.format_exc(),
                    )
                    raise

        self.logger.debug("parallel_terms_completed", label=label, count=len(items))
        return results

    def reduce_sum(self, fn: Callable[[T], R], items: Sequence[T], zero: R, label: str = "terms") -> R:
        """Soma determinística: mapa paralelo e soma na ordem das entradas"""
        total = zero
        for value in self.map(fn, items, label):
            total = total + value
        return total
