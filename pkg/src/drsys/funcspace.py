"""Locally constant functions on a boundary-path space and the two shift operators.

A :class:`LocallyConstantFn` is a finite sum of values on pairwise disjoint
cylinders; it is zero off their union.  Scalars are ``int``, ``Fraction`` or
``complex``; integer and rational arithmetic stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from .errors import GraphSyntaxError, SupportError
from .graph import (
    BoundaryPoint,
    Cylinder,
    DirectedGraph,
    Path,
    cylinder_partition,
    cylinders_up_to,
    parse_path,
    parse_point,
    refine_cylinder,
    some_point,
)
from .homcheck import Homeomorphism, Transducer, require_homeomorphism
from .system import DRSystem

Scalar = Union[int, Fraction, complex]


class LocallyConstantFn:
    """``values`` maps pairwise disjoint cylinders to nonzero scalars."""

    __slots__ = ("graph", "values")

    def __init__(self, graph: DirectedGraph, values: dict[Cylinder, Scalar] | None = None):
        self.graph = graph
        self.values = {c: v for c, v in (values or {}).items() if v != 0}
        keys = set(self.values)
        for c in keys:
            for k in range(len(c.edges)):
                if Path(c.start, c.edges[:k]) in keys:
                    raise ValueError(f"cylinders {Path(c.start, c.edges[:k])} and {c} overlap")

    @classmethod
    def from_terms(cls, graph: DirectedGraph, terms: Iterable[tuple[Cylinder, Scalar]]) -> "LocallyConstantFn":
        """Sum of ``value * indicator(cylinder)``; the cylinders may overlap."""
        terms = [(c, v) for c, v in terms if v != 0]
        if not terms:
            return cls(graph)
        depth = max(len(c) for c, _ in terms)
        acc: dict[Cylinder, Scalar] = {}
        for c, v in terms:
            for cell in refine_cylinder(graph, c, depth):
                acc[cell] = acc.get(cell, 0) + v
        return cls(graph, acc)

    @classmethod
    def indicator(cls, graph: DirectedGraph, c: Cylinder, value: Scalar = 1) -> "LocallyConstantFn":
        return cls(graph, {c: value})

    @classmethod
    def constant(cls, graph: DirectedGraph, value: Scalar) -> "LocallyConstantFn":
        return cls(graph, {Path(v): value for v in graph.vertices})

    @property
    def depth(self) -> int:
        return max((len(c) for c in self.values), default=0)

    def at_depth(self, depth: int) -> dict[Cylinder, Scalar]:
        """Nonzero values on the refinement of the support to cells of length ``depth``."""
        out: dict[Cylinder, Scalar] = {}
        for c, v in self.values.items():
            for cell in refine_cylinder(self.graph, c, depth):
                out[cell] = v
        return out

    def value_on(self, c: Cylinder) -> Scalar:
        """The constant value on Z(c); requires ``len(c) >= depth`` or Z(c) a singleton."""
        for k in range(len(c.edges) + 1):
            v = self.values.get(Path(c.start, c.edges[:k]))
            if v is not None:
                return v
        return 0

    def __call__(self, x: BoundaryPoint) -> Scalar:
        return evaluate(self, x)

    def _combine(self, other: "LocallyConstantFn", op) -> "LocallyConstantFn":
        if self.graph != other.graph:
            raise ValueError("functions live on different graphs")
        d = max(self.depth, other.depth)
        a, b = self.at_depth(d), other.at_depth(d)
        return LocallyConstantFn(self.graph, {c: op(a.get(c, 0), b.get(c, 0)) for c in a.keys() | b.keys()})

    def __add__(self, other):
        return self._combine(other, lambda s, t: s + t)

    def __sub__(self, other):
        return self._combine(other, lambda s, t: s - t)

    def __mul__(self, other):
        if isinstance(other, LocallyConstantFn):
            return self._combine(other, lambda s, t: s * t)
        return self.scale(other)

    __rmul__ = __mul__

    def __neg__(self):
        return self.scale(-1)

    def scale(self, s: Scalar) -> "LocallyConstantFn":
        return LocallyConstantFn(self.graph, {c: s * v for c, v in self.values.items()})

    def conj(self) -> "LocallyConstantFn":
        return LocallyConstantFn(
            self.graph, {c: v.conjugate() if isinstance(v, complex) else v for c, v in self.values.items()}
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, LocallyConstantFn) or self.graph != other.graph:
            return NotImplemented
        d = max(self.depth, other.depth)
        return self.at_depth(d) == other.at_depth(d)

    def __hash__(self):
        return hash(frozenset(self.at_depth(self.depth).items()))

    def is_zero(self) -> bool:
        return not self.values

    def supported_in_domain(self) -> bool:
        """Whether the support lies inside dom(sigma)."""
        return all(c.edges or not self.graph.is_sink(c.start) for c in self.values)

    def __repr__(self) -> str:
        if not self.values:
            return "0"
        return " + ".join(f"{v}*1[{c}]" for c, v in sorted(self.values.items(), key=lambda cv: (len(cv[0]), str(cv[0]))))


def evaluate(f: LocallyConstantFn, x: BoundaryPoint) -> Scalar:
    g = f.graph
    origin = g.origin(x)
    syms = x.expand(f.depth)
    for k in range(len(syms) + 1):
        v = f.values.get(Path(origin, syms[:k]))
        if v is not None:
            return v
    return 0


def refine(f: LocallyConstantFn, g: LocallyConstantFn) -> tuple[dict[Cylinder, Scalar], dict[Cylinder, Scalar], list[Cylinder]]:
    """Values of ``f`` and ``g`` on one shared partition (returned third)."""
    d = max(f.depth, g.depth)
    cells = cylinder_partition(f.graph, d)
    a, b = f.at_depth(d), g.at_depth(d)
    return {c: a.get(c, 0) for c in cells}, {c: b.get(c, 0) for c in cells}, cells


def sigma_upper_star(sys: DRSystem, f: LocallyConstantFn) -> LocallyConstantFn:
    """``x -> f(sigma(x))`` on dom(sigma), zero elsewhere."""
    g = sys.graph
    out = {}
    for c, v in f.values.items():
        for e in g.in_edges(c.start):
            out[Path(g.src(e), (e,) + c.edges)] = v
    return LocallyConstantFn(g, out)


def sigma_lower_star(sys: DRSystem, f: LocallyConstantFn) -> LocallyConstantFn:
    """``x -> sum of f(z) over z with sigma(z) = x``; f must vanish off dom(sigma)."""
    g = sys.graph
    terms = []
    for c, v in f.values.items():
        if c.edges:
            cells = [c]
        elif g.is_sink(c.start):
            raise SupportError(f"cylinder {c} meets the complement of dom(sigma)")
        else:
            cells = [Path(c.start, (e,)) for e in g.out_edges(c.start)]
        for cell in cells:
            terms.append((Path(g.dst(cell.edges[0]), cell.edges[1:]), v))
    return LocallyConstantFn.from_terms(g, terms)


def precompose(f: LocallyConstantFn, T: Transducer) -> LocallyConstantFn:
    """``f o T`` as a function on the source graph of ``T``."""
    src = T.source
    need = max(f.depth, 1)
    cells = cylinder_partition(src, need + T.max_lag)
    out = {}
    for cell in cells:
        outs, q, p = T.run(T.initial, cell.edges)
        if p is not None:
            out[cell] = f(T.target.prepend_path(tuple(outs), p))
        elif src.is_sink(src.end(cell)):
            out[cell] = f(T.target.prepend_path(tuple(outs), T.sink_point(q, src.end(cell))))
        else:
            head = tuple(outs[:need])
            out[cell] = f.value_on(Path(T.target.src(head[0]), head))
    return LocallyConstantFn(src, out)


def pullback(h: Homeomorphism, f: LocallyConstantFn) -> LocallyConstantFn:
    """``f o h^-1``, a function on the target of ``h``."""
    h = require_homeomorphism(h)
    if f.graph != h.source:
        raise ValueError("function does not live on the source of the map")
    return precompose(f, h.inverse)


@dataclass
class PropSigmaReport:
    cond_upper: bool
    cond_lower: bool
    depth: int
    family_size: int
    witness_upper: tuple | None = None
    witness_lower: tuple | None = None


def _differ_at(a: LocallyConstantFn, b: LocallyConstantFn) -> BoundaryPoint:
    diff = a - b
    c = next(iter(diff.values))
    return some_point(a.graph, c)


def check_prop_sigma(sysE: DRSystem, sysF: DRSystem, h: Homeomorphism, depth: int) -> PropSigmaReport:
    """Both function-algebra conditions on the cylinder-indicator family up to ``depth``.

    Upper: pullback(sigma^*(f) g) == sigma^*(pullback f) pullback(g).
    Lower: pullback and its inverse keep functions supported in dom(sigma)
    inside dom(sigma), and pullback(sigma_*(f)) == sigma_*(pullback f).
    """
    h = require_homeomorphism(h)
    E, F = sysE.graph, sysF.graph
    fam = [LocallyConstantFn.indicator(E, c) for c in cylinders_up_to(E, depth)]
    fam_F = [LocallyConstantFn.indicator(F, c) for c in cylinders_up_to(F, depth)]
    pulled = [pullback(h, f) for f in fam]
    report = PropSigmaReport(True, True, depth, len(fam))

    # pullback is multiplicative, so the left side factors as pullback(sigma^* f) * pullback(g)
    for f, pf in zip(fam, pulled):
        left_f = pullback(h, sigma_upper_star(sysE, f))
        right_f = sigma_upper_star(sysF, pf)
        if left_f == right_f:
            continue
        for g, pg in zip(fam, pulled):
            lhs, rhs = left_f * pg, right_f * pg
            if lhs != rhs:
                report.cond_upper = False
                report.witness_upper = (f, g, _differ_at(lhs, rhs))
                break
        if not report.cond_upper:
            break

    inv = Homeomorphism.__new__(Homeomorphism)
    inv.forward, inv.inverse, inv.certificate = h.inverse, h.forward, h.certificate
    for f, pf in zip(fam, pulled):
        if f.supported_in_domain() and not pf.supported_in_domain():
            report.cond_lower = False
            report.witness_lower = (f, None, some_point(F, next(c for c in pf.values if not c.edges)))
            return report
    for k in fam_F:
        pk = pullback(inv, k)
        if k.supported_in_domain() and not pk.supported_in_domain():
            report.cond_lower = False
            report.witness_lower = (k, None, some_point(E, next(c for c in pk.values if not c.edges)))
            return report
    for f, pf in zip(fam, pulled):
        if not f.supported_in_domain():
            continue
        lhs = pullback(h, sigma_lower_star(sysE, f))
        rhs = sigma_lower_star(sysF, pf)
        if lhs != rhs:
            report.cond_lower = False
            report.witness_lower = (f, None, _differ_at(lhs, rhs))
            break
    return report


# text format ------------------------------------------------------------------------

def parse_scalar(text: str) -> Scalar:
    text = text.strip()
    if text.endswith("i"):
        return complex(text[:-1] + "j")
    if "/" in text:
        return Fraction(text)
    return int(text)


def parse_function(text: str, graph: DirectedGraph) -> LocallyConstantFn:
    """Parse ``cyl <literal> <value>`` lines; overlapping cylinders add up."""
    terms = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] != "cyl" or len(parts) != 3:
            raise GraphSyntaxError(f"cannot parse {line!r}", lineno)
        lit = parts[1]
        try:
            if "(" in lit or ("@" in lit and not lit.startswith("@")):
                x = parse_point(graph, lit)
                if not x.is_finite:
                    raise GraphSyntaxError(f"{lit} is not an isolated point; use a cylinder")
                c = Path(graph.origin(x), x.prefix)
            else:
                c = parse_path(graph, lit)
            value = parse_scalar(parts[2])
        except GraphSyntaxError as exc:
            raise GraphSyntaxError(str(exc), lineno) from exc
        except Exception as exc:
            raise GraphSyntaxError(str(exc), lineno) from exc
        terms.append((c, value))
    return LocallyConstantFn.from_terms(graph, terms)


def format_function(f: LocallyConstantFn) -> str:
    lines = []
    for c, v in f.values.items():
        if isinstance(v, complex):
            s = f"{v.real!r}{v.imag:+}i"
        else:
            s = str(v)
        lines.append(f"cyl {c} {s}")
    return "\n".join(lines) + "\n"
