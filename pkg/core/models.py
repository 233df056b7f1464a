"""
Modelos de dados do motor.

CorrDiff guarda omega^(g)_{m,n} dividido por prod dz_i: as variáveis 1..m formam
o bloco x e m+1..m+n o bloco y. As tabelas são preenchidas sob demanda por um
produtor (TR clássica para n = 0, passo de troca para n > 0) com memoização.
"""
import threading
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from pydantic import BaseModel, Field, field_validator
from sympy import QQ

from config.settings import (
    CONVENTIONS,
    ENGINE_VERSION,
    Command,
    CurveFamily,
    EngineConfig,
    Formula,
    Method,
    OutputFormat,
    Side,
)
from core.errors import MissingEntryError, PreconditionError, UnstableEntryError
from core.exact_algebra import (
    ONE,
    SYMBOLS,
    MRat,
    coefficients,
    format_rational,
    from_coefficients,
    parse_rational,
    rename,
)
from core.spectral_curve import CurveSpec, SpectralCurve
from utils.logger import get_logger
from utils.serialization import decode_mrat, digest, encode_mrat, format_mrat


logger = get_logger("omega_tables")

Label = Tuple[int, int, int]


def euler(g: int, m: int, n: int) -> int:
    return 2 * g - 2 + m + n


def is_stable(g: int, m: int, n: int) -> bool:
    return euler(g, m, n) > 0


def check_label(g: int, m: int, n: int) -> Label:
    if g < 0 or m < 0 or n < 0 or m + n == 0:
        raise PreconditionError(f"invalid label (g,m,n)=({g},{m},{n})")
    return (g, m, n)


def bergman(i: int = 1, j: int = 2) -> MRat:
    """B(z_i, z_j) / (dz_i dz_j)"""
    return ONE / (SYMBOLS.gen(i) - SYMBOLS.gen(j)) ** 2


def unstable_body(curve: SpectralCurve, g: int, m: int, n: int) -> MRat:
    """Convenções fixas: -y dx, -x dy, B e -B"""
    label = (g, m, n)
    if label == (0, 1, 0):
        return -curve.y * curve.derivative(Side.X)
    if label == (0, 0, 1):
        return -curve.x * curve.derivative(Side.Y)
    if label in ((0, 2, 0), (0, 0, 2)):
        return bergman(1, 2)
    if label == (0, 1, 1):
        return -bergman(1, 2)
    raise UnstableEntryError(f"(g,m,n)=({g},{m},{n}) is not an unstable label")


def place(body: MRat, slots: Sequence[int]) -> MRat:
    """Move a variável i do layout canônico para slots[i-1]"""
    return rename(body, {i: s for i, s in enumerate(slots, start=1)})


def swap_blocks(body: MRat, a: int, b: int) -> MRat:
    """Reescreve um corpo do layout (a variáveis | b variáveis) em (b | a)"""
    mapping = {i: b + i for i in range(1, a + 1)}
    mapping.update({a + j: j for j in range(1, b + 1)})
    return rename(body, mapping)


@dataclass(frozen=True)
class CorrDiff:
    """Diferencial de correlação omega^(g)_{m,n} com metadados de bloco"""
    g: int
    m: int
    n: int
    body: MRat
    formula: Formula = Formula.UNSTABLE

    @property
    def label(self) -> Label:
        return (self.g, self.m, self.n)

    @property
    def stable(self) -> bool:
        return is_stable(self.g, self.m, self.n)

    @property
    def x_vars(self) -> List[int]:
        return list(range(1, self.m + 1))

    @property
    def y_vars(self) -> List[int]:
        return list(range(self.m + 1, self.m + self.n + 1))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "g": self.g,
            "m": self.m,
            "n": self.n,
            "formula": self.formula.value,
            "body": encode_mrat(self.body),
            "text": format_mrat(self.body),
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "CorrDiff":
        return cls(
            g=int(payload["g"]),
            m=int(payload["m"]),
            n=int(payload["n"]),
            body=decode_mrat(payload["body"]),
            formula=Formula(payload.get("formula", Formula.UNSTABLE.value)),
        )


Producer = Callable[["OmegaTable", int, int, int], CorrDiff]


class TableView:
    """Interface comum de tabelas e visões"""

    curve: SpectralCurve

    def entry(self, g: int, m: int, n: int) -> CorrDiff:
        raise NotImplementedError

    def get(self, g: int, m: int, n: int) -> MRat:
        return self.entry(g, m, n).body

    def swapped(self) -> "TableView":
        view = getattr(self, "_swapped_view", None)
        if view is None:
            view = SwappedView(self)
            self._swapped_view = view
        return view

    def prefetch(self, labels: Iterable[Label]):
        """Calcula dependências em série antes de um mapa paralelo"""
        for g, m, n in sorted(set(labels), key=lambda k: (euler(*k), k)):
            self.entry(g, m, n)


class OmegaTable(TableView):
    """
    Tabela de omega^(g)_{m,n} de uma curva.

    Entradas instáveis vêm da convenção; as estáveis do cache ou do produtor.
    O produtor roda fora da trava (ele pode consultar a tabela a partir de
    threads do executor); a inserção é feita sob a trava e a primeira escrita
    vence.
    """

    def __init__(self, curve: SpectralCurve, producer: Optional[Producer] = None):
        self.curve = curve
        self.producer = producer
        self.entries: Dict[Label, CorrDiff] = {}
        self._unstable: Dict[Label, CorrDiff] = {}
        self._lock = threading.RLock()

    def has(self, g: int, m: int, n: int) -> bool:
        return not is_stable(g, m, n) or (g, m, n) in self.entries

    def put(self, cd: CorrDiff) -> CorrDiff:
        check_label(*cd.label)
        with self._lock:
            return self.entries.setdefault(cd.label, cd)

    def entry(self, g: int, m: int, n: int) -> CorrDiff:
        label = check_label(g, m, n)
        if not is_stable(g, m, n):
            cached = self._unstable.get(label)
            if cached is None:
                cached = CorrDiff(g, m, n, unstable_body(self.curve, g, m, n), Formula.UNSTABLE)
                with self._lock:
                    cached = self._unstable.setdefault(label, cached)
            return cached
        cached = self.entries.get(label)
        if cached is not None:
            return cached
        if self.producer is None:
            raise MissingEntryError(label)
        start = time.time()
        produced = self.producer(self, g, m, n)
        stored = self.put(produced)
        logger.log_entry_computed(label, produced.formula.value, time.time() - start,
                                  curve=self.curve.name)
        return stored

    @property
    def euler_bound(self) -> int:
        return max((euler(*k) for k in self.entries), default=0)

    def labels(self) -> List[Label]:
        return sorted(self.entries, key=lambda k: (euler(*k), k[0], k[2], k[1]))

    def column(self, n: int = 0) -> List[CorrDiff]:
        return [self.entries[k] for k in self.labels() if k[2] == n]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "curve": self.curve.name,
            "euler_bound": self.euler_bound,
            "entries": [self.entries[k].to_dict() for k in self.labels()],
        }


class SwappedView(TableView):
    """A tabela de (x, y) lida como a tabela de (y, x), com os blocos trocados"""

    def __init__(self, base: TableView):
        self.base = base
        self.curve = base.curve.swapped()
        self._cache: Dict[Label, CorrDiff] = {}
        self._lock = threading.Lock()

    def entry(self, g: int, m: int, n: int) -> CorrDiff:
        label = check_label(g, m, n)
        cached = self._cache.get(label)
        if cached is not None:
            return cached
        src = self.base.entry(g, n, m)
        cd = CorrDiff(g, m, n, swap_blocks(src.body, n, m), src.formula)
        with self._lock:
            return self._cache.setdefault(label, cd)

    def swapped(self) -> TableView:
        return self.base


class OverrideView(TableView):
    """Tabela com algumas entradas substituídas (usada pela separação de polos)"""

    def __init__(self, base: TableView, overrides: Dict[Label, MRat]):
        self.base = base
        self.curve = base.curve
        self.overrides = dict(overrides)

    def entry(self, g: int, m: int, n: int) -> CorrDiff:
        label = check_label(g, m, n)
        if label in self.overrides:
            return CorrDiff(g, m, n, self.overrides[label], Formula.OVERRIDE)
        return self.base.entry(g, m, n)


@dataclass
class PsiTable:
    """Números de interseção <tau_k1 ... tau_km>_g indexados pela tupla ordenada k"""
    g: int
    m: int
    entries: Dict[Tuple[int, ...], Any] = field(default_factory=dict)

    def value(self, ks: Iterable[int]):
        return self.entries.get(tuple(ks), QQ.zero)

    def dimension_ok(self, ks: Tuple[int, ...]) -> bool:
        return sum(ks) == 3 * self.g - 3 + self.m

    def to_dict(self) -> Dict[str, Any]:
        return {
            "g": self.g,
            "entries": [
                {"k": list(k), "value": format_rational(v)}
                for k, v in sorted(self.entries.items())
            ],
        }


# ---------------------------------------------------------------------------
# Modelos de entrada/saída validados (pydantic)
# ---------------------------------------------------------------------------

class RationalFunctionModel(BaseModel):
    """Função racional univariada por coeficientes ascendentes"""
    num: List[str] = Field(..., min_length=1, description="Coeficientes do numerador, strings p/q")
    den: List[str] = Field(default_factory=lambda: ["1"], description="Coeficientes do denominador")

    @field_validator("num", "den", mode="before")
    @classmethod
    def _exact(cls, value):
        if not isinstance(value, list):
            raise ValueError("coefficients must be a list")
        out = []
        for c in value:
            if isinstance(c, float):
                raise ValueError("floating point coefficients are not accepted")
            out.append(format_rational(parse_rational(c)))
        return out

    def to_mrat(self) -> MRat:
        return from_coefficients([parse_rational(c) for c in self.num],
                                 [parse_rational(c) for c in self.den])

    @classmethod
    def from_mrat(cls, f: MRat) -> "RationalFunctionModel":
        return cls(
            num=[format_rational(c) for c in coefficients(f.numer)],
            den=[format_rational(c) for c in coefficients(f.denom)],
        )


class CurveFile(BaseModel):
    """Arquivo de curva espectral"""
    name: str = Field(..., min_length=1, description="Nome da curva")
    x: RationalFunctionModel = Field(..., description="x(z)")
    y: RationalFunctionModel = Field(..., description="y(z)")

    def to_spec(self) -> CurveSpec:
        return CurveSpec(self.name, self.x.to_mrat(), self.y.to_mrat())

    @classmethod
    def from_spec(cls, spec: CurveSpec) -> "CurveFile":
        return cls(name=spec.name, x=RationalFunctionModel.from_mrat(spec.x),
                   y=RationalFunctionModel.from_mrat(spec.y))

    def digest(self) -> str:
        """Digest da forma canônica (coeficientes reduzidos)"""
        canonical = CurveFile.from_spec(self.to_spec())
        return digest(canonical.model_dump(mode="json"))


class RunConfig(BaseModel):
    """Configuração de um comando da CLI"""
    command: Command = Field(..., description="Comando")
    curve: Optional[str] = Field(default=None, description="Caminho do arquivo de curva")
    family: Optional[CurveFamily] = Field(default=None, description="Curva da biblioteca com y = z, no lugar de --curve")
    r: int = Field(default=2, ge=2, description="Parâmetro r das famílias witten, hypermap e theta")
    epsilon: str = Field(default="0", description="eps da curva witten, racional exato")
    lam: str = Field(default="1", description="lambda da curva theta, racional exato")
    chi: int = Field(default=1, ge=1, description="Maior 2g-2+m+n calculado")
    g: Optional[int] = Field(default=None, ge=0, description="Gênero alvo")
    m: Optional[int] = Field(default=None, ge=0, description="Argumentos do tipo x")
    n: Optional[int] = Field(default=None, ge=0, description="Argumentos do tipo y")
    method: Method = Field(default=Method.SIMPLE, description="Fórmula das diferenciais mistas")
    hbar_cutoff: Optional[int] = Field(default=None, ge=0, description="Corte em hbar (expoente)")
    cache_dir: str = Field(default=EngineConfig.CACHE_DIR, description="Diretório do cache")
    output_format: OutputFormat = Field(default=OutputFormat.PRETTY, description="Formato de saída")
    seed: int = Field(default=EngineConfig.PROBE_SEED, description="Semente das sondas")
    max_workers: int = Field(default=EngineConfig.MAX_WORKERS, ge=1, description="Threads do executor")

    def require(self, *names: str):
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise PreconditionError(f"command {self.command.value} needs --{', --'.join(missing)}")


class ResultEnvelope(BaseModel):
    """Um resultado gravado em disco, com proveniência e digest do corpo"""
    curve_hash: str = Field(..., description="Digest da curva canônica")
    curve_name: str = Field(..., description="Nome da curva")
    g: int = Field(..., ge=0)
    m: int = Field(..., ge=0)
    n: int = Field(..., ge=0)
    formula: Formula = Field(..., description="Fórmula usada")
    body: Dict[str, Any] = Field(..., description="omega/prod dz codificado")
    text: str = Field(..., description="Forma legível do corpo")
    body_digest: str = Field(..., description="Digest do corpo codificado")
    engine_version: str = Field(default=ENGINE_VERSION)
    conventions: Dict[str, str] = Field(default_factory=CONVENTIONS.to_dict)
    seed: int = Field(default=EngineConfig.PROBE_SEED)

    @classmethod
    def from_corrdiff(cls, cd: CorrDiff, curve_hash: str, curve_name: str,
                      seed: int = EngineConfig.PROBE_SEED) -> "ResultEnvelope":
        body = encode_mrat(cd.body)
        return cls(curve_hash=curve_hash, curve_name=curve_name, g=cd.g, m=cd.m, n=cd.n,
                   formula=cd.formula, body=body, text=format_mrat(cd.body),
                   body_digest=digest(body), seed=seed)

    def matches(self, curve_hash: str) -> bool:
        return (self.curve_hash == curve_hash
                and self.engine_version == ENGINE_VERSION
                and self.conventions == CONVENTIONS.to_dict())

    def intact(self) -> bool:
        return digest(self.body) == self.body_digest

    def to_corrdiff(self) -> CorrDiff:
        return CorrDiff(self.g, self.m, self.n, decode_mrat(self.body), self.formula)
