"""
Fórmulas fechadas por somas de grafos.

omega^(g)_{m,n} / (prod dx_M prod dy_N) =
    (-1)^n [hbar^2g] sum_Gamma hbar^{2 betti} / |Aut| prod_{vértices i}
    sum_k d_{y_i}^k [w_i^k] (dx_i/dy_i) (1/w_i) e^{w_i S(hbar w_i d_{x_i}) omega_{1,0}/dx - w_i omega^(0)_{1,0}/dx}
    prod_{arestas} (pernas em vértices regulares vestidas com w S(hbar w d_x))
    + delta_{(g,m,n),(0,0,1)} (-x_1)

Folhas (1..m) são variáveis x sem operadores; vértices regulares (m+1..m+n)
são as variáveis y.
"""
import uuid
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from sympy import QQ

from config.settings import Formula, OperatorForm, Side
from core.errors import PreconditionError
from core.exact_algebra import ONE, ZERO, HbarSeries, MRat, rename
from core.graphs import Graph, enumerate_graphs
from core.models import CorrDiff, TableView, check_label
from core.operator_series import OperatorFrame, s_operator_terms, t_cal_term
from core.term_executor import TermExecutor
from utils.logger import get_logger


logger = get_logger("graph_sums")


@dataclass(frozen=True)
class EdgeShape:
    """Aresta de tamanho size; as primeiras leaf_legs pernas vão para folhas"""
    size: int
    leaf_legs: int
    diagonal: bool

    @classmethod
    def of(cls, edge: Tuple[int, ...], m: int) -> "EdgeShape":
        leaf_legs = sum(1 for v in edge if v <= m)
        return cls(len(edge), leaf_legs, len(edge) == 2 and edge[0] == edge[1])


def _edge_terms(table: TableView, frame: OperatorFrame, shape: EdgeShape,
                cutoff: int, genus_max: int) -> List[Tuple[int, Tuple[int, ...], MRat]]:
    """
    Termos (expoente de hbar, j por perna vestida, coeficiente) da aresta no
    layout canônico 1..size, antes da restrição aos vértices.
    """
    dressed = list(range(shape.leaf_legs + 1, shape.size + 1))
    out = []
    for genus in range(genus_max + 1):
        f = table.get(genus, shape.size, 0)
        for leg in range(1, shape.size + 1):
            f = f / frame.dx(leg)
        if (genus, shape.size) == (0, 2) and shape.diagonal:
            f = f - frame.regularizer(1, 2)
        budget = (cutoff - 2 * genus) // 2
        for js, term in s_operator_terms(f, dressed, budget, frame.derive_x).items():
            out.append((2 * genus + 2 * sum(js), js, term))
    return out


def _vertex_base(table: TableView, frame: OperatorFrame, cutoff: int) -> HbarSeries:
    """(1/w) exp(w S(hbar w d_x) sum hbar^2g omega_{1,0}/dx - w omega^(0)_{1,0}/dx) em z_1"""
    single = t_cal_term(table, 0, 0, 1, cutoff, OperatorForm.SIMPLE)
    lead = HbarSeries.monomial(cutoff, single.params, (0, 1), frame.leading_exponent(1))
    exponent = single - lead
    factor = exponent.exp() if exponent else HbarSeries.constant(cutoff, single.params)
    return factor.shift((0, -1))


class GraphSum:
    """Avaliação da soma de grafos para um rótulo (g, m, n)"""

    def __init__(self, table: TableView, g: int, m: int, n: int):
        check_label(g, m, n)
        self.table = table
        self.g, self.m, self.n = g, m, n
        self.cutoff = 2 * g
        self.frame = OperatorFrame(table.curve, OperatorForm.SIMPLE)
        self.params = tuple(f"w{v}" for v in range(m + 1, m + n + 1))
        self._edges: Dict[EdgeShape, List[Tuple[int, Tuple[int, ...], MRat]]] = {}
        self._vertices: Dict[int, HbarSeries] = {}

    def _param_key(self, hbar: int, powers: Dict[int, int]) -> Tuple[int, ...]:
        key = [hbar] + [0] * self.n
        for v, p in powers.items():
            key[v - self.m] += p
        return tuple(key)

    def prepare(self, graphs: List[Graph]):
        """Calcula em série as formas de aresta e os fatores de vértice"""
        caps: Dict[EdgeShape, int] = {}
        for graph in graphs:
            for edge in graph.edges:
                shape = EdgeShape.of(edge, self.m)
                caps[shape] = max(caps.get(shape, 0), self.g - graph.betti)
        for shape in sorted(caps, key=lambda s: (s.size, s.leaf_legs, s.diagonal)):
            self._edges[shape] = _edge_terms(self.table, self.frame, shape, self.cutoff, caps[shape])
        if self.n:
            base = _vertex_base(self.table, self.frame, self.cutoff)
            for v in range(self.m + 1, self.m + self.n + 1):
                coeffs = {
                    self._param_key(h, {v: p}): rename(c, {1: v})
                    for (h, p), c in base.coeffs.items()
                }
                self._vertices[v] = HbarSeries(self.cutoff, self.params, coeffs)

    def edge_series(self, edge: Tuple[int, ...]) -> HbarSeries:
        shape = EdgeShape.of(edge, self.m)
        mapping = {j: v for j, v in enumerate(edge, start=1)}
        dressed_vertices = edge[shape.leaf_legs:]
        coeffs: Dict[Tuple[int, ...], MRat] = {}
        for hbar, js, term in self._edges[shape]:
            powers: Dict[int, int] = {}
            for v, j in zip(dressed_vertices, js):
                powers[v] = powers.get(v, 0) + 1 + 2 * j
            key = self._param_key(hbar, powers)
            coeffs[key] = coeffs.get(key, ZERO) + rename(term, mapping)
        return HbarSeries(self.cutoff, self.params, coeffs)

    def graph_term(self, graph: Graph) -> HbarSeries:
        series = HbarSeries.constant(self.cutoff, self.params)
        for v in graph.vertices:
            series = series * self._vertices[v]
        for edge in graph.edges:
            series = series * self.edge_series(edge)
            if not series:
                break
        shift = (2 * graph.betti,) + (0,) * self.n
        return series.shift(shift).scale(QQ(1, graph.aut_order))

    def assemble(self, total: HbarSeries) -> MRat:
        """Extrai hbar^2g, aplica d_y^k [w^k] (dx/dy) e volta para a forma"""
        frame = self.frame
        vertices = list(range(self.m + 1, self.m + self.n + 1))
        ratio = ONE
        for v in vertices:
            ratio = ratio * frame.dx(v) / frame.dy(v)
        result = ZERO
        for key, coeff in sorted(total.hbar_part(self.cutoff).coeffs.items()):
            powers = key[1:]
            if any(p < 0 for p in powers):
                continue
            value = coeff * ratio
            for v, p in zip(vertices, powers):
                for _ in range(p):
                    value = frame.derive_y(value, v)
            result += value
        if self.n % 2:
            result = -result
        if (self.g, self.m, self.n) == (0, 0, 1):
            result += -self.table.curve.function(Side.X, 1)
        for i in range(1, self.m + 1):
            result = result * self.table.curve.derivative(Side.X, i)
        for v in vertices:
            result = result * self.table.curve.derivative(Side.Y, v)
        return result


def graph_sum_mixed(table: TableView, g: int, m: int, n: int,
                    executor: Optional[TermExecutor] = None) -> CorrDiff:
    """omega^(g)_{m,n} pela soma sobre grafos com m folhas e n vértices regulares"""
    if n < 0 or m < 0:
        raise PreconditionError(f"invalid label (g,m,n)=({g},{m},{n})")
    evaluator = GraphSum(table, g, m, n)
    graphs = enumerate_graphs(n, m, max_betti=g)
    evaluator.prepare(graphs)
    executor = executor or TermExecutor(1)
    with logger.execution_context(str(uuid.uuid4()), "graph_sum", curve=table.curve.name,
                                  g=g, m=m, n=n, graphs=len(graphs)):
        total = executor.reduce_sum(evaluator.graph_term, graphs,
                                    HbarSeries(evaluator.cutoff, evaluator.params),
                                    label=f"graphs_{g}_{m}_{n}")
        body = evaluator.assemble(total)
    return CorrDiff(g, m, n, body, Formula.GRAPH_SUM)


def graph_sum_swap(table: TableView, g: int, n: int,
                   executor: Optional[TermExecutor] = None) -> CorrDiff:
    """omega^(g)_{0,n}: a fórmula universal da troca x-y a partir da coluna n = 0"""
    if n < 1:
        raise PreconditionError("graph_sum_swap needs n >= 1", n=n)
    return graph_sum_mixed(table, g, 0, n, executor)
