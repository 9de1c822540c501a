"""Finite directed graphs, paths, boundary points and cylinder sets.

A boundary point of a finite graph is either a finite path ending at a sink
or an infinite path.  Only eventually periodic infinite paths are
representable individually; they are stored as a lasso ``prefix.(cycle)^w``
in canonical form, which makes point equality a syntactic comparison.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

from .errors import GraphError, GraphSyntaxError

_ID = re.compile(r"[A-Za-z0-9_]+\Z")
_IDS = r"[A-Za-z0-9_]+(?:\.[A-Za-z0-9_]+)*"
_LASSO = re.compile(rf"(?:(?P<pre>{_IDS})\.)?\((?P<cyc>{_IDS})\)\^w\Z")
_FINITE = re.compile(rf"(?P<path>{_IDS})?(?:@(?P<v>[A-Za-z0-9_]+))?\Z")


@dataclass(frozen=True)
class Edge:
    id: str
    src: str
    dst: str


@dataclass(frozen=True)
class Path:
    """A path ``edges`` starting at vertex ``start``; length 0 is a bare vertex.

    Used both as a plain path and as the base of the cylinder Z(path).
    """

    start: str
    edges: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.edges)

    def __str__(self) -> str:
        return ".".join(self.edges) if self.edges else "@" + self.start


Cylinder = Path


@dataclass(frozen=True, order=True)
class BoundaryPoint:
    """Finite point (``cycle`` empty, ``sink`` set) or lasso (``cycle`` nonempty).

    Build instances through :meth:`DirectedGraph.finite_point` or
    :func:`canonical_lasso`; the raw constructor does not canonicalize.
    """

    prefix: tuple[str, ...]
    cycle: tuple[str, ...] = ()
    sink: str = ""

    @property
    def is_finite(self) -> bool:
        return not self.cycle

    @property
    def description_length(self) -> int:
        return len(self.prefix) + len(self.cycle)

    def symbols(self) -> Iterator[str]:
        yield from self.prefix
        while self.cycle:
            yield from self.cycle

    def expand(self, n: int) -> tuple[str, ...]:
        """First ``n`` edge symbols (fewer for a short finite point)."""
        out = []
        for i, s in enumerate(self.symbols()):
            if i >= n:
                break
            out.append(s)
        return tuple(out)

    def __str__(self) -> str:
        return format_point(self)


@dataclass(frozen=True)
class DirectedGraph:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("duplicate vertex id")
        ids = [e.id for e in self.edges]
        if len(set(ids)) != len(ids):
            raise GraphError("duplicate edge id")
        vs = set(self.vertices)
        for e in self.edges:
            if e.src not in vs or e.dst not in vs:
                raise GraphError(f"edge {e.id} refers to an undeclared vertex")

    @classmethod
    def build(cls, vertices: Iterable[str], edges: Iterable[tuple[str, str, str]], name: str = ""):
        return cls(tuple(vertices), tuple(Edge(*e) for e in edges), name)

    @cached_property
    def _edge(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def _out(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {v: [] for v in self.vertices}
        for e in self.edges:
            out[e.src].append(e.id)
        return {v: tuple(es) for v, es in out.items()}

    @cached_property
    def _in(self) -> dict[str, tuple[str, ...]]:
        into: dict[str, list[str]] = {v: [] for v in self.vertices}
        for e in self.edges:
            into[e.dst].append(e.id)
        return {v: tuple(es) for v, es in into.items()}

    @cached_property
    def edge_ids(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.edges)

    @cached_property
    def sinks(self) -> tuple[str, ...]:
        return tuple(v for v in self.vertices if not self._out[v])

    def has_edge(self, e: str) -> bool:
        return e in self._edge

    def src(self, e: str) -> str:
        try:
            return self._edge[e].src
        except KeyError:
            raise GraphError(f"unknown edge {e!r}") from None

    def dst(self, e: str) -> str:
        try:
            return self._edge[e].dst
        except KeyError:
            raise GraphError(f"unknown edge {e!r}") from None

    def out_edges(self, v: str) -> tuple[str, ...]:
        return self._out[v]

    def in_edges(self, v: str) -> tuple[str, ...]:
        return self._in[v]

    def is_sink(self, v: str) -> bool:
        return not self._out[v]

    # paths -----------------------------------------------------------------

    def path(self, edges: Iterable[str]) -> Path:
        edges = tuple(edges)
        if not edges:
            raise GraphError("an empty path needs an explicit start vertex")
        self._check_composable(edges)
        return Path(self.src(edges[0]), edges)

    def vertex_path(self, v: str) -> Path:
        if v not in self._out:
            raise GraphError(f"unknown vertex {v!r}")
        return Path(v)

    def end(self, p: Path) -> str:
        return self.dst(p.edges[-1]) if p.edges else p.start

    def _check_composable(self, edges: tuple[str, ...]):
        for a, b in zip(edges, edges[1:]):
            if self.dst(a) != self.src(b):
                raise GraphError(f"edges {a} and {b} are not composable")
        for e in edges:
            self.src(e)

    def paths_from(self, v: str, length: int) -> Iterator[tuple[str, ...]]:
        """All edge sequences of exactly ``length`` edges starting at ``v``."""
        if length == 0:
            yield ()
            return
        for e in self._out[v]:
            for rest in self.paths_from(self.dst(e), length - 1):
                yield (e,) + rest

    def closed_paths(self, length: int) -> Iterator[tuple[str, ...]]:
        for v in self.vertices:
            for p in self.paths_from(v, length):
                if self.dst(p[-1]) == v:
                    yield p

    # points ----------------------------------------------------------------

    def finite_point(self, edges: Iterable[str] = (), sink: str | None = None) -> BoundaryPoint:
        edges = tuple(edges)
        if edges:
            self._check_composable(edges)
            end = self.dst(edges[-1])
            if sink is not None and sink != end:
                raise GraphError(f"path ends at {end}, not {sink}")
        elif sink is None:
            raise GraphError("a bare finite point needs its sink vertex")
        else:
            end = sink
        if end not in self._out:
            raise GraphError(f"unknown vertex {end!r}")
        if self._out[end]:
            raise GraphError(f"finite boundary paths must end at a sink; {end} emits edges")
        return BoundaryPoint(edges, (), end)

    def origin(self, x: BoundaryPoint) -> str:
        if x.prefix:
            return self.src(x.prefix[0])
        if x.cycle:
            return self.src(x.cycle[0])
        return x.sink

    def prepend(self, e: str, x: BoundaryPoint) -> BoundaryPoint:
        """The point ``e.x``; requires ``dst(e)`` to be the origin of ``x``."""
        if self.dst(e) != self.origin(x):
            raise GraphError(f"edge {e} does not end at the origin of {x}")
        return self.prepend_path((e,), x)

    def prepend_path(self, edges: tuple[str, ...], x: BoundaryPoint) -> BoundaryPoint:
        if not edges:
            return x
        if x.is_finite:
            return BoundaryPoint(edges + x.prefix, (), x.sink)
        return canonical_lasso(self, edges + x.prefix, x.cycle)

    # structure ---------------------------------------------------------------

    @cached_property
    def is_acyclic(self) -> bool:
        state: dict[str, int] = {}

        def visit(v: str) -> bool:
            state[v] = 1
            for e in self._out[v]:
                w = self.dst(e)
                if state.get(w) == 1:
                    return False
                if w not in state and not visit(w):
                    return False
            state[v] = 2
            return True

        return all(visit(v) for v in self.vertices if v not in state)

    def longest_path_length(self) -> int:
        if not self.is_acyclic:
            raise GraphError("longest path is unbounded in a cyclic graph")
        memo: dict[str, int] = {}

        def depth(v: str) -> int:
            if v not in memo:
                memo[v] = max((1 + depth(self.dst(e)) for e in self._out[v]), default=0)
            return memo[v]

        return max((depth(v) for v in self.vertices), default=0)

    def __str__(self) -> str:
        return format_graph(self)


def canonical_lasso(graph: DirectedGraph, prefix: Iterable[str], cycle: Iterable[str]) -> BoundaryPoint:
    """Canonical form of the eventually periodic point ``prefix.(cycle)^w``.

    The cycle is reduced to its primitive root and the prefix is shortened
    for as long as its last edge equals the last edge of the cycle, rotating
    the cycle each time.
    """
    prefix, cycle = tuple(prefix), tuple(cycle)
    if not cycle:
        raise GraphError("empty cycle")
    graph._check_composable(prefix + cycle)
    if graph.dst(cycle[-1]) != graph.src(cycle[0]):
        raise GraphError(f"cycle {'.'.join(cycle)} is not closed")
    n = len(cycle)
    for d in range(1, n + 1):
        if n % d == 0 and cycle[:d] * (n // d) == cycle:
            cycle = cycle[:d]
            break
    while prefix and prefix[-1] == cycle[-1]:
        prefix = prefix[:-1]
        cycle = cycle[-1:] + cycle[:-1]
    return BoundaryPoint(prefix, cycle)


def membership(graph: DirectedGraph, x: BoundaryPoint, c: Cylinder) -> bool:
    """Whether ``x`` lies in the cylinder Z(c)."""
    if c.start not in graph.vertices:
        raise GraphError(f"cylinder {c} is not over this graph")
    if graph.origin(x) != c.start:
        return False
    return x.expand(len(c.edges)) == c.edges


def refine_cylinder(graph: DirectedGraph, c: Cylinder, depth: int) -> list[Cylinder]:
    """Partition Z(c) into cylinders of length ``depth`` plus short sink singletons."""
    if len(c) >= depth:
        return [c]
    out = []
    end = graph.end(c)
    if graph.is_sink(end):
        return [c]
    for e in graph.out_edges(end):
        out.extend(refine_cylinder(graph, Path(c.start, c.edges + (e,)), depth))
    return out


def cylinder_partition(graph: DirectedGraph, depth: int) -> list[Cylinder]:
    """Clopen partition of the boundary-path space into depth-``depth`` cells."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    cells = []
    for v in graph.vertices:
        cells.extend(refine_cylinder(graph, Path(v), depth))
    return cells


def cylinders_up_to(graph: DirectedGraph, depth: int) -> list[Cylinder]:
    """Every nonempty cylinder Z(mu) with ``|mu| <= depth``, shortest first."""
    out = []
    for n in range(depth + 1):
        for v in graph.vertices:
            out.extend(Path(v, p) for p in graph.paths_from(v, n))
    return out


def some_point(graph: DirectedGraph, c: Cylinder) -> BoundaryPoint:
    """A representative point of Z(c), found by following first edges."""
    edges = list(c.edges)
    seen: dict[str, int] = {}
    v = graph.end(c)
    while True:
        if graph.is_sink(v):
            return graph.finite_point(edges, v) if edges else graph.finite_point((), v)
        if v in seen:
            i = seen[v]
            return canonical_lasso(graph, edges[:i], edges[i:])
        seen[v] = len(edges)
        e = graph.out_edges(v)[0]
        edges.append(e)
        v = graph.dst(e)


def enumerate_points(graph: DirectedGraph, max_length: int) -> list[BoundaryPoint]:
    """All representable points whose description length is at most ``max_length``."""
    found: set[BoundaryPoint] = set()
    for v in graph.vertices:
        if graph.is_sink(v):
            found.add(BoundaryPoint((), (), v))
    for n in range(1, max_length + 1):
        for v in graph.vertices:
            for p in graph.paths_from(v, n):
                end = graph.dst(p[-1])
                if graph.is_sink(end):
                    found.add(BoundaryPoint(p, (), end))
                for i in range(n):
                    if graph.dst(p[-1]) == graph.src(p[i]):
                        found.add(canonical_lasso(graph, p[:i], p[i:]))
    return sorted(found, key=lambda x: (x.description_length, x))


# text formats -----------------------------------------------------------------


def parse_graph(text: str, name: str = "") -> DirectedGraph:
    """Parse the line-based graph format (``vertex <id>`` / ``edge <id> <src> <dst>``)."""
    vertices: list[str] = []
    edges: list[Edge] = []
    seen_v: set[str] = set()
    seen_e: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        for tok in parts[1:]:
            if not _ID.match(tok):
                raise GraphSyntaxError(f"invalid identifier {tok!r}", lineno)
        if parts[0] == "vertex" and len(parts) == 2:
            if parts[1] in seen_v:
                raise GraphSyntaxError(f"duplicate vertex {parts[1]!r}", lineno)
            seen_v.add(parts[1])
            vertices.append(parts[1])
        elif parts[0] == "edge" and len(parts) == 4:
            eid, s, d = parts[1:]
            if eid in seen_e:
                raise GraphSyntaxError(f"duplicate edge {eid!r}", lineno)
            seen_e.add(eid)
            edges.append(Edge(eid, s, d))
        else:
            raise GraphSyntaxError(f"cannot parse {line!r}", lineno)
    for e in edges:
        for v in (e.src, e.dst):
            if v not in seen_v:
                raise GraphSyntaxError(f"edge {e.id} refers to undeclared vertex {v!r}")
    return DirectedGraph(tuple(vertices), tuple(edges), name)


def format_graph(graph: DirectedGraph) -> str:
    lines = [f"vertex {v}" for v in graph.vertices]
    lines += [f"edge {e.id} {e.src} {e.dst}" for e in graph.edges]
    return "\n".join(lines) + "\n"


def parse_point(graph: DirectedGraph, text: str) -> BoundaryPoint:
    """Parse ``e1.e2@v`` / ``@v`` (finite) or ``e1.(c1.c2)^w`` (lasso)."""
    text = text.strip()
    m = _LASSO.match(text)
    if m:
        pre = tuple(m["pre"].split(".")) if m["pre"] else ()
        return canonical_lasso(graph, pre, tuple(m["cyc"].split(".")))
    m = _FINITE.match(text)
    if not m or not (m["path"] or m["v"]):
        raise GraphSyntaxError(f"invalid point literal {text!r}")
    edges = tuple(m["path"].split(".")) if m["path"] else ()
    return graph.finite_point(edges, m["v"])


def parse_path(graph: DirectedGraph, text: str) -> Path:
    """Parse a path literal ``e1.e2`` or a bare vertex ``@v``."""
    text = text.strip()
    if text.startswith("@"):
        return graph.vertex_path(text[1:])
    if not re.fullmatch(_IDS, text):
        raise GraphSyntaxError(f"invalid path literal {text!r}")
    return graph.path(text.split("."))


def format_point(x: BoundaryPoint) -> str:
    if x.cycle:
        cyc = "(" + ".".join(x.cycle) + ")^w"
        return ".".join(x.prefix + (cyc,))
    if not x.prefix:
        return "@" + x.sink
    return ".".join(x.prefix)
