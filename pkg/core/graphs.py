"""
Grafos das somas de grafos.

Um grafo tem folhas rotuladas 1..m e vértices regulares m+1..m+n. Cada
multiaresta é uma tupla ordenada de rótulos (com repetição) de tamanho >= 2,
e o grafo é o multiconjunto ordenado dessas tuplas.
"""
import math
from collections import Counter
from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement
from typing import Any, Dict, Iterator, List, Optional, Tuple

import networkx as nx

from core.errors import PreconditionError
from utils.logger import get_logger


logger = get_logger("graphs")

Edge = Tuple[int, ...]


@dataclass(frozen=True)
class Graph:
    """Hipergrafo conexo com multiarestas; folhas têm valência exatamente 1"""
    n_vertices: int
    m_leaves: int
    edges: Tuple[Edge, ...]

    @property
    def leaves(self) -> List[int]:
        return list(range(1, self.m_leaves + 1))

    @property
    def vertices(self) -> List[int]:
        return list(range(self.m_leaves + 1, self.m_leaves + self.n_vertices + 1))

    @property
    def betti(self) -> int:
        """Primeiro número de Betti: soma de (|e| - 1) - |V| + 1"""
        return sum(len(e) - 1 for e in self.edges) - (self.n_vertices + self.m_leaves) + 1

    @property
    def aut_order(self) -> int:
        order = 1
        for count in Counter(self.edges).values():
            order *= math.factorial(count)
        for e in self.edges:
            for mult in Counter(e).values():
                order *= math.factorial(mult)
        return order

    def valence(self, v: int) -> int:
        return sum(e.count(v) for e in self.edges)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_vertices": self.n_vertices,
            "m_leaves": self.m_leaves,
            "edges": [list(e) for e in self.edges],
            "betti": self.betti,
            "aut_order": self.aut_order,
        }


def is_connected(n_vertices: int, m_leaves: int, edges: Tuple[Edge, ...]) -> bool:
    nodes = range(1, n_vertices + m_leaves + 1)
    skeleton = nx.Graph()
    skeleton.add_nodes_from(nodes)
    for e in edges:
        distinct = sorted(set(e))
        skeleton.add_edges_from(zip(distinct, distinct[1:]))
    return nx.is_connected(skeleton)


def _candidate_edges(labels: List[int], leaves: int, max_size: int) -> List[Edge]:
    out = []
    for size in range(2, max_size + 1):
        for e in combinations_with_replacement(labels, size):
            if any(e.count(v) > 1 for v in e if v <= leaves):
                continue
            out.append(e)
    return sorted(out, key=lambda e: (len(e), e))


def enumerate_graphs(n_vertices: int, m_leaves: int = 0, max_betti: int = 0,
                     max_edge_size: Optional[int] = None) -> List[Graph]:
    """
    Todos os grafos conexos com n vértices regulares e m folhas e
    Betti <= max_betti, sem repetição e em ordem canônica.

    O orçamento sum(|e| - 1) <= max_betti + |V| - 1 limita tanto o tamanho
    quanto o número das multiarestas.
    """
    if n_vertices < 0 or m_leaves < 0 or max_betti < 0:
        raise PreconditionError("graph enumeration needs non-negative sizes",
                                n_vertices=n_vertices, m_leaves=m_leaves, max_betti=max_betti)
    total = n_vertices + m_leaves
    if total == 0:
        return []
    budget = max_betti + total - 1
    size_cap = budget + 1 if max_edge_size is None else min(budget + 1, max_edge_size)
    labels = list(range(1, total + 1))
    candidates = _candidate_edges(labels, m_leaves, size_cap)

    def extend(start: int, remaining: int, chosen: List[Edge], used: Counter) -> Iterator[Tuple[Edge, ...]]:
        yield tuple(chosen)
        for idx in range(start, len(candidates)):
            e = candidates[idx]
            cost = len(e) - 1
            if cost > remaining:
                continue
            leaves_here = [v for v in e if v <= m_leaves]
            if any(used[v] for v in leaves_here):
                continue
            used.update(leaves_here)
            chosen.append(e)
            yield from extend(idx, remaining - cost, chosen, used)
            chosen.pop()
            used.subtract(leaves_here)

    found = []
    for edges in extend(0, budget, [], Counter()):
        leaf_use = Counter(v for e in edges for v in e if v <= m_leaves)
        if any(leaf_use[v] != 1 for v in range(1, m_leaves + 1)):
            continue
        if not is_connected(n_vertices, m_leaves, edges):
            continue
        graph = Graph(n_vertices, m_leaves, edges)
        if graph.betti <= max_betti:
            found.append(graph)
    found.sort(key=lambda gr: (len(gr.edges), gr.edges))
    logger.debug("graph_enumeration_done", n_vertices=n_vertices, m_leaves=m_leaves,
                 max_betti=max_betti, count=len(found))
    return found


def enumerate_simple_graphs(m: int, max_betti: Optional[int] = None) -> List[Graph]:
    """Grafos simples conexos (sem laços nem arestas múltiplas) em m vértices rotulados"""
    if m < 1:
        raise PreconditionError("simple graphs need at least one vertex", m=m)
    pairs = list(combinations(range(1, m + 1), 2))
    found = []
    for count in range(len(pairs) + 1):
        if max_betti is not None and count - m + 1 > max_betti:
            break
        for edges in combinations(pairs, count):
            if is_connected(m, 0, edges):
                found.append(Graph(m, 0, tuple(edges)))
    return found
