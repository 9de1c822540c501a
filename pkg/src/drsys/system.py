"""The boundary-path dynamical system of a finite graph.

``sigma`` drops the first edge of a boundary point.  Its domain is every
point of length at least one; bare sink points are outside it.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import networkx as nx
import numpy as np

from .errors import DomainError
from .graph import BoundaryPoint, DirectedGraph, canonical_lasso


@dataclass(frozen=True)
class PeriodicityReport:
    """``kind`` is ``"aperiodic"``, ``"periodic"`` or ``"eventually_periodic"``."""

    kind: str
    preperiod: int = 0
    period: int = 0

    def __str__(self) -> str:
        if self.kind == "aperiodic":
            return "Aperiodic"
        if self.kind == "periodic":
            return f"Periodic({self.period})"
        return f"EventuallyPeriodic({self.preperiod}, {self.period})"


APERIODIC = PeriodicityReport("aperiodic")


class DRSystem:
    """The pair (boundary-path space, shift) of a finite directed graph."""

    def __init__(self, graph: DirectedGraph):
        self.graph = graph

    def __repr__(self) -> str:
        return f"DRSystem({self.graph.name or id(self.graph)})"

    def in_domain(self, x: BoundaryPoint, k: int = 1) -> bool:
        """Whether ``x`` lies in the domain of the ``k``-th shift power."""
        return not x.is_finite or len(x.prefix) >= k

    def shift(self, x: BoundaryPoint, k: int = 1) -> BoundaryPoint:
        if k < 0:
            raise ValueError("k must be nonnegative")
        if not self.in_domain(x, k):
            raise DomainError(f"{x} has fewer than {k} edges")
        if k == 0:
            return x
        if x.is_finite:
            return BoundaryPoint(x.prefix[k:], (), x.sink)
        if k <= len(x.prefix):
            return canonical_lasso(self.graph, x.prefix[k:], x.cycle)
        r = (k - len(x.prefix)) % len(x.cycle)
        return BoundaryPoint((), x.cycle[r:] + x.cycle[:r])

    def preimages(self, x: BoundaryPoint) -> list[BoundaryPoint]:
        g = self.graph
        return [g.prepend(e, x) for e in g.in_edges(g.origin(x))]

    def same_orbit(self, x: BoundaryPoint, y: BoundaryPoint) -> tuple[int, int] | None:
        """Lexicographically least (k, l) with shift^k(x) == shift^l(y), if any."""
        bound = x.description_length + y.description_length + len(self.graph.edges)
        for k in range(bound + 1):
            if not self.in_domain(x, k):
                break
            sx = self.shift(x, k)
            for l in range(bound + 1):
                if not self.in_domain(y, l):
                    break
                if self.shift(y, l) == sx:
                    return k, l
        return None

    def periodicity(self, x: BoundaryPoint) -> PeriodicityReport:
        if x.is_finite:
            return APERIODIC
        if not x.prefix:
            return PeriodicityReport("periodic", 0, len(x.cycle))
        return PeriodicityReport("eventually_periodic", len(x.prefix), len(x.cycle))

    def is_topologically_free(self) -> bool:
        """Condition L: every cycle has an exit."""
        return not self.cycles_without_exit()

    def cycles_without_exit(self) -> list[list[str]]:
        """Vertex sets of cycles in which every vertex emits exactly one edge."""
        g = self.graph
        dg = nx.MultiDiGraph()
        dg.add_nodes_from(g.vertices)
        dg.add_edges_from((e.src, e.dst) for e in g.edges)
        bad = []
        for comp in nx.strongly_connected_components(dg):
            inner = [e for e in g.edges if e.src in comp and e.dst in comp]
            if not inner:
                continue
            if all(len(g.out_edges(v)) == 1 for v in comp):
                bad.append(sorted(comp, key=g.vertices.index))
        return sorted(bad)

    def edge_matrix(self) -> np.ndarray:
        """Edge adjacency matrix: entry (e, f) is 1 when f can follow e."""
        g = self.graph
        n = len(g.edges)
        a = np.zeros((n, n), dtype=object)
        for i, e in enumerate(g.edges):
            for j, f in enumerate(g.edges):
                if e.dst == f.src:
                    a[i, j] = 1
        return a

    def periodic_count(self, p: int) -> int:
        """Number of points x with shift^p(x) == x, as the trace of A^p."""
        if p < 1:
            raise ValueError("p must be positive")
        a = self.edge_matrix()
        if a.size == 0:
            return 0
        m = np.identity(a.shape[0], dtype=object)
        for _ in range(p):
            m = m.dot(a)
        return int(np.trace(m))

    def domain_description(self) -> dict[str, list[str]]:
        """Clopen descriptions of dom(sigma) and ran(sigma) as cylinder lists."""
        g = self.graph
        dom = list(g.edge_ids)
        ran = [f"@{v}" for v in g.vertices if g.in_edges(v)]
        return {"dom": dom, "ran": ran}


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)
