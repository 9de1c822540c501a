"""Candidate homeomorphisms between boundary-path spaces, given as transducers.

A :class:`Transducer` reads the edges of a boundary point of its source graph
and writes edges of its target graph.  Each transition emits at most one
edge; the deficit (the *lag*) must be a function of the state, so every
infinite input yields an infinite output and the output prefix of length n
is fixed by the first ``n + max_lag`` input edges.  Two extras make the
model closed under the maps we need:

* ``sink_out[(q, v)]`` is the remaining output when the input ends at sink v;
* ``halt[q]`` is the remaining output once state q is reached, whatever
  input follows (an infinite input may then map to a finite point).

Every decision here reduces to :func:`compare_streams`, a breadth-first
search over the product of two machines driven by the same input.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Hashable

from .errors import (
    DomainError,
    GraphSyntaxError,
    NotEventuallyConjugate,
    UnverifiedMapError,
    ValidityError,
)
from .graph import (
    BoundaryPoint,
    DirectedGraph,
    Path,
    canonical_lasso,
    enumerate_points,
    format_point,
    parse_point,
)
from .system import DRSystem

log = logging.getLogger(__name__)


class Transducer:
    """Deterministic transducer from boundary points of ``source`` to ``target``.

    ``trans`` maps ``(state, source_edge)`` to ``(output, next_state)`` where
    ``output`` is a tuple of at most one target edge.  The constructor checks
    output validity by product reachability and raises :class:`ValidityError`.
    """

    def __init__(
        self,
        source: DirectedGraph,
        target: DirectedGraph,
        states,
        initial,
        trans: dict[tuple[Any, str], tuple[tuple[str, ...], Any]],
        sink_out: dict[tuple[Any, str], BoundaryPoint] | None = None,
        halt: dict[Any, BoundaryPoint] | None = None,
        name: str = "",
    ):
        self.source = source
        self.target = target
        self.states = tuple(states)
        self.initial = initial
        self.trans = {k: (tuple(o), n) for k, (o, n) in trans.items()}
        self.sink_out = dict(sink_out or {})
        self.halt = dict(halt or {})
        self.name = name
        if initial not in self.states:
            raise ValidityError(f"initial state {initial!r} is not declared")
        self.lag: dict[Any, int] = {}
        self._validate()
        self.max_lag = max(self.lag.values(), default=0)

    def __repr__(self) -> str:
        return f"Transducer({self.name or '?'}: {len(self.states)} states)"

    # machine interface used by compare_streams ---------------------------------

    def step(self, q, e: str) -> tuple[tuple[str, ...], Any]:
        try:
            return self.trans[(q, e)]
        except KeyError:
            raise ValidityError(f"no transition from state {q!r} on edge {e}") from None

    def halt_point(self, q) -> BoundaryPoint | None:
        return self.halt.get(q)

    def sink_point(self, q, v: str) -> BoundaryPoint:
        try:
            return self.sink_out[(q, v)]
        except KeyError:
            raise ValidityError(f"no sink output from state {q!r} at sink {v}") from None

    # -------------------------------------------------------------------------

    def _validate(self):
        src, tgt = self.source, self.target
        for (q, e), (o, n) in self.trans.items():
            if q not in self.states or n not in self.states:
                raise ValidityError(f"transition ({q}, {e}) uses an undeclared state")
            if not src.has_edge(e):
                raise ValidityError(f"transition input {e} is not an edge of the source graph")
            if len(o) > 1:
                raise ValidityError(f"transition ({q}, {e}) emits more than one edge")
            if o and not tgt.has_edge(o[0]):
                raise ValidityError(f"output {o[0]} is not an edge of the target graph")
        self.lag[self.initial] = 0
        start = [(self.initial, v, None) for v in src.vertices]
        seen = set(start)
        queue = deque(start)
        while queue:
            q, v, w = queue.popleft()
            p = self.halt.get(q)
            if p is not None:
                if w is not None and tgt.origin(p) != w:
                    raise ValidityError(f"halt output of {q!r} does not continue from vertex {w}")
                continue
            if src.is_sink(v):
                p = self.sink_point(q, v)
                if w is not None and tgt.origin(p) != w:
                    raise ValidityError(
                        f"sink output {format_point(p)} of ({q!r}, {v}) does not start at {w}"
                    )
                continue
            for e in src.out_edges(v):
                o, n = self.step(q, e)
                lag = self.lag[q] + 1 - len(o)
                if self.lag.setdefault(n, lag) != lag:
                    raise ValidityError(f"state {n!r} is reached with inconsistent lag")
                nw = w
                if o:
                    f = o[0]
                    if w is not None and tgt.src(f) != w:
                        raise ValidityError(f"output {f} does not continue the path at {w}")
                    nw = tgt.dst(f)
                node = (n, src.dst(e), nw)
                if node not in seen:
                    seen.add(node)
                    queue.append(node)
        self.reachable = seen

    def run(self, q, edges) -> tuple[list[str], Any, BoundaryPoint | None]:
        """Feed ``edges`` from state ``q``; returns outputs, final state, halt point."""
        out: list[str] = []
        for e in edges:
            p = self.halt.get(q)
            if p is not None:
                return out, q, p
            o, q = self.step(q, e)
            out.extend(o)
        return out, q, self.halt.get(q)

    def apply_from(self, q, x: BoundaryPoint) -> BoundaryPoint:
        """The output stream produced from state ``q`` on input ``x``."""
        tgt = self.target
        out, q, p = self.run(q, x.prefix)
        if p is not None:
            return tgt.prepend_path(tuple(out), p)
        if x.is_finite:
            return tgt.prepend_path(tuple(out), self.sink_point(q, x.sink))
        seen: dict[Any, int] = {}
        passes: list[list[str]] = []
        while q not in seen:
            seen[q] = len(passes)
            o, q, p = self.run(q, x.cycle)
            if p is not None:
                pre = out + [s for ps in passes for s in ps] + o
                return tgt.prepend_path(tuple(pre), p)
            passes.append(o)
        i = seen[q]
        pre = out + [s for ps in passes[:i] for s in ps]
        cyc = [s for ps in passes[i:] for s in ps]
        return canonical_lasso(tgt, pre, cyc)

    def apply(self, x: BoundaryPoint) -> BoundaryPoint:
        return self.apply_from(self.initial, x)

    def __call__(self, x: BoundaryPoint) -> BoundaryPoint:
        return self.apply(x)


class _Identity:
    """The identity map of a graph, in machine form."""

    def __init__(self, graph: DirectedGraph):
        self.graph = graph

    def step(self, q, e):
        return (e,), q

    def halt_point(self, q):
        return None

    def sink_point(self, q, v):
        return BoundaryPoint((), (), v)


class _Composite:
    """``second`` applied after ``first``; states are pairs."""

    def __init__(self, first: Transducer, second: Transducer):
        self.first = first
        self.second = second

    def step(self, qr, e):
        q, r = qr
        o, q2 = self.first.step(q, e)
        outs: tuple[str, ...] = ()
        for s in o:
            if self.second.halt_point(r) is not None:
                break
            o2, r = self.second.step(r, s)
            outs += o2
        return outs, (q2, r)

    def halt_point(self, qr):
        q, r = qr
        p = self.second.halt_point(r)
        if p is not None:
            return p
        p = self.first.halt_point(q)
        if p is not None:
            return self.second.apply_from(r, p)
        return None

    def sink_point(self, qr, v):
        q, r = qr
        return self.second.apply_from(r, self.first.sink_point(q, v))


_UNDEF = "undefined"


def _drop(graph: DirectedGraph, x: BoundaryPoint, k: int):
    try:
        return DRSystem(graph).shift(x, k)
    except DomainError:
        return _UNDEF


@dataclass
class StreamMismatch:
    path: Path
    reason: str


def compare_streams(
    out_graph: DirectedGraph,
    in_graph: DirectedGraph,
    start: str,
    ma,
    qa,
    mb,
    qb,
    skip_a: int = 0,
    skip_b: int = 0,
    buf_a: tuple[str, ...] = (),
    buf_b: tuple[str, ...] = (),
    const_a=None,
    limit: int = 200_000,
) -> tuple[StreamMismatch | None, int]:
    """Decide whether two machines emit the same stream on every input from ``start``.

    Side A's stream is ``buf_a`` followed by the output of ``ma`` from ``qa``,
    with its first ``skip_a`` symbols dropped; likewise for B.  Streams that
    are both undefined (dropped past the end of a finite output) count as
    equal.  Returns ``(None, explored)`` or ``(mismatch, explored)`` where the
    mismatch carries the shortest offending input path.  ``const_a``, when
    given, replaces side A by a fixed remaining stream.
    """

    def settle(side):
        # halted machines become constant points; apply skips to buffers
        if side[0] == "r":
            _, m, q, buf, skip = side
            p = m.halt_point(q)
            if p is not None:
                full = out_graph.prepend_path(buf, p) if buf else p
                return ("c", _drop(out_graph, full, skip))
            k = min(skip, len(buf))
            return ("r", m, q, buf[k:], skip - k)
        return side

    def match(a, b):
        """Cancel common leading symbols; returns (a, b, ok)."""
        if a[0] == "r" and b[0] == "r":
            ba, bb = a[3], b[3]
            n = min(len(ba), len(bb))
            if ba[:n] != bb[:n]:
                return a, b, False
            return a[:3] + (ba[n:], a[4]), b[:3] + (bb[n:], b[4]), True
        if a[0] == "c" and b[0] == "c":
            return a, b, True
        flipped = a[0] == "c"
        run, const = (b, a) if flipped else (a, b)
        buf, point = run[3], const[1]
        for s in buf:
            if point == _UNDEF or point.expand(1) != (s,):
                return a, b, False
            point = DRSystem(out_graph).shift(point, 1)
        run = run[:3] + ((), run[4])
        const = ("c", point)
        return (const, run, True) if flipped else (run, const, True)

    def key(side):
        return side if side[0] == "c" else (side[0], id(side[1]), side[2], side[3], side[4])

    def remainder(side, v):
        if side[0] == "c":
            return side[1]
        _, m, q, buf, skip = side
        p = m.sink_point(q, v)
        full = out_graph.prepend_path(buf, p) if buf else p
        return _drop(out_graph, full, skip)

    if const_a is not None:
        a = ("c", const_a)
    else:
        a = settle(("r", ma, qa, tuple(buf_a), skip_a))
    b = settle(("r", mb, qb, tuple(buf_b), skip_b))
    a, b, ok = match(a, b)
    if not ok:
        return StreamMismatch(Path(start), "leading output differs"), 1
    first = (key(a), key(b), start)
    parent: dict[Hashable, tuple[Hashable, str] | None] = {first: None}
    queue = deque([(a, b, start)])

    def path_to(node, extra=()):
        edges = list(extra)
        while parent[node] is not None:
            node, e = parent[node]
            edges.append(e)
        return Path(start, tuple(reversed(edges)))

    while queue:
        if len(parent) > limit:
            raise RuntimeError("product automaton exceeded its exploration limit")
        a, b, v = queue.popleft()
        node = (key(a), key(b), v)
        if a[0] == "c" and b[0] == "c":
            if a[1] != b[1]:
                return StreamMismatch(path_to(node), "final outputs differ"), len(parent)
            continue
        if in_graph.is_sink(v):
            if remainder(a, v) != remainder(b, v):
                return StreamMismatch(path_to(node), "outputs at sink differ"), len(parent)
            continue
        for e in in_graph.out_edges(v):
            na, nb = a, b
            if a[0] == "r":
                o, q = a[1].step(a[2], e)
                na = settle(("r", a[1], q, a[3] + o, a[4]))
            if b[0] == "r":
                o, q = b[1].step(b[2], e)
                nb = settle(("r", b[1], q, b[3] + o, b[4]))
            na, nb, ok = match(na, nb)
            if not ok:
                return StreamMismatch(path_to(node, (e,)), "emitted edges differ"), len(parent)
            child = (key(na), key(nb), in_graph.dst(e))
            if child not in parent:
                parent[child] = (node, e)
                queue.append((na, nb, in_graph.dst(e)))
    return None, len(parent)


# homeomorphisms -----------------------------------------------------------------


@dataclass
class HomeomorphismCertificate:
    ok: bool
    product_states: int
    offending: str = ""


def verify_homeomorphism(T: Transducer, T_inv: Transducer) -> HomeomorphismCertificate:
    """Check that ``T_inv o T`` and ``T o T_inv`` both act as the identity."""
    if T.source != T_inv.target or T.target != T_inv.source:
        return HomeomorphismCertificate(False, 0, "graphs of the two transducers do not match")
    total = 0
    for first, second in ((T, T_inv), (T_inv, T)):
        g = first.source
        comp, ident = _Composite(first, second), _Identity(g)
        for v in g.vertices:
            bad, n = compare_streams(
                g, g, v, comp, (first.initial, second.initial), ident, None
            )
            total += n
            if bad is not None:
                which = "inverse after map" if first is T else "map after inverse"
                return HomeomorphismCertificate(
                    False, total, f"{which} is not the identity on cylinder {bad.path} ({bad.reason})"
                )
    return HomeomorphismCertificate(True, total)


class Homeomorphism:
    """A transducer together with a verified inverse transducer."""

    def __init__(self, forward: Transducer, inverse: Transducer):
        cert = verify_homeomorphism(forward, inverse)
        if not cert.ok:
            raise UnverifiedMapError(cert.offending)
        self.forward = forward
        self.inverse = inverse
        self.certificate = cert

    @property
    def source(self) -> DirectedGraph:
        return self.forward.source

    @property
    def target(self) -> DirectedGraph:
        return self.forward.target

    def __call__(self, x: BoundaryPoint) -> BoundaryPoint:
        return self.forward.apply(x)

    def inv(self, y: BoundaryPoint) -> BoundaryPoint:
        return self.inverse.apply(y)

    def reversed(self) -> "Homeomorphism":
        return Homeomorphism(self.inverse, self.forward)


def require_homeomorphism(h) -> Homeomorphism:
    if not isinstance(h, Homeomorphism):
        raise UnverifiedMapError("expected a verified Homeomorphism, got " + type(h).__name__)
    return h


# conjugacy ------------------------------------------------------------------------


@dataclass
class ConjugacyVerdict:
    is_homeomorphism: bool
    is_conjugacy: bool
    failing_condition: str | None = None
    witness: str | None = None
    eventual_k_bound: int | None = None
    domain_route: bool | None = None
    preimage_route: bool | None = None
    routes_agree: bool = True
    sample_length: int = 0
    product_states: int = 0
    details: dict = field(default_factory=dict)


def check_domain(h: Homeomorphism) -> str | None:
    """h(dom sigma_E) == dom sigma_F, via the complements (bare sink points)."""
    for T in (h.forward, h.inverse):
        for v in T.source.sinks:
            y = T.apply(BoundaryPoint((), (), v))
            if not (y.is_finite and not y.prefix):
                return f"@{v} maps to {format_point(y)}, which lies in dom(sigma)"
    return None


def check_commute(h: Homeomorphism) -> StreamMismatch | None:
    """h(sigma(x)) == sigma(h(x)) for every x in dom sigma_E, by product automata."""
    T = h.forward
    for e in T.source.edge_ids:
        bad = _commute_from_edge(T, e, 0)
        if bad is not None:
            return StreamMismatch(Path(T.source.src(e), (e,) + bad.path.edges), bad.reason)
    return None


def _commute_from_edge(T: Transducer, e: str, k: int) -> StreamMismatch | None:
    # x = e.x': compare shift^(k+1) h(x) with shift^k h(x') over all x'
    g = T.source
    p = T.halt_point(T.initial)
    if p is not None:
        const = _drop(T.target, p, k + 1)
        return compare_streams(T.target, g, g.dst(e), None, None, T, T.initial, 0, k, const_a=const)[0]
    o, q1 = T.step(T.initial, e)
    return compare_streams(T.target, g, g.dst(e), T, q1, T, T.initial, k + 1, k, buf_a=o)[0]


def check_preimages(h: Homeomorphism, sample_length: int = 4) -> str | None:
    """Preimage-set equalities in both directions on every point up to ``sample_length``."""
    for f, fname in ((h.forward, "h"), (h.inverse, "h^-1")):
        sx, sy = DRSystem(f.source), DRSystem(f.target)
        for x in enumerate_points(f.source, sample_length):
            lhs = {f.apply(z) for z in sx.preimages(x)}
            rhs = set(sy.preimages(f.apply(x)))
            if lhs != rhs:
                return f"{fname}(sigma^-1({format_point(x)})) != sigma^-1({fname}({format_point(x)}))"
    return None


def check_conjugacy(T: Transducer, T_inv: Transducer, sample_length: int = 4) -> ConjugacyVerdict:
    """Decide whether ``T`` is a conjugacy, by domain+commuting and by preimage sets."""
    cert = verify_homeomorphism(T, T_inv)
    if not cert.ok:
        return ConjugacyVerdict(
            False, False, "Homeomorphism", cert.offending, product_states=cert.product_states
        )
    h = Homeomorphism.__new__(Homeomorphism)
    h.forward, h.inverse, h.certificate = T, T_inv, cert
    dom_bad = check_domain(h)
    commute_bad = check_commute(h) if dom_bad is None else None
    route2 = dom_bad is None and commute_bad is None
    pre_bad = check_preimages(h, sample_length)
    route3 = pre_bad is None
    verdict = ConjugacyVerdict(
        True,
        route2 and route3,
        domain_route=route2,
        preimage_route=route3,
        routes_agree=route2 == route3,
        sample_length=sample_length,
        product_states=cert.product_states,
    )
    if dom_bad is not None:
        verdict.failing_condition, verdict.witness = "Dom", dom_bad
    elif commute_bad is not None:
        verdict.failing_condition = "Commute"
        verdict.witness = f"cyl {commute_bad.path}"
    elif pre_bad is not None:
        verdict.failing_condition, verdict.witness = "PreimageSetEquality", pre_bad
    if pre_bad is not None:
        verdict.details["preimage_witness"] = pre_bad
    if not verdict.routes_agree:
        log.error("conjugacy routes disagree for %r: domain=%s preimage=%s", T, route2, route3)
    verdict.eventual_k_bound = uniform_eventual_bound(h)
    return verdict


# eventual conjugacy -----------------------------------------------------------------


def _maybe_shift(graph: DirectedGraph, x: BoundaryPoint, k: int):
    return _drop(graph, x, k)


def eventual_k(h: Homeomorphism, x: BoundaryPoint, bound: int | None = None) -> int:
    """Least k with shift^(k+1)(h(x)) == shift^k(h(shift(x)))."""
    h = require_homeomorphism(h)
    T = h.forward
    sx = DRSystem(T.source)
    if not sx.in_domain(x, 1):
        raise DomainError(f"{format_point(x)} is not in dom(sigma)")
    if bound is None:
        bound = len(T.states) * x.description_length + len(T.source.edges)
    hx, hsx = T.apply(x), T.apply(sx.shift(x, 1))
    for k in range(bound + 1):
        if _maybe_shift(T.target, hx, k + 1) == _maybe_shift(T.target, hsx, k):
            return k
    raise NotEventuallyConjugate(x, bound)


def uniform_eventual_bound(h: Homeomorphism) -> int | None:
    """Least K with eventual_k(x) <= K on all of dom sigma, or None if unbounded."""
    T = h.forward
    g = T.source
    if not g.edges:
        return 0
    sink_len = max(
        [p.description_length for p in T.sink_out.values()]
        + [p.description_length for p in T.halt.values()]
        + [0]
    )
    limit = (len(T.states) ** 2) * len(g.vertices) * (2 * T.max_lag + 2) + sink_len + 2
    for k in range(limit + 1):
        if all(_commute_from_edge(T, e, k) is None for e in g.edge_ids):
            return k
    return None


# text format --------------------------------------------------------------------------


def parse_transducer(text: str, source: DirectedGraph, target: DirectedGraph, name: str = "") -> Transducer:
    """Parse ``state``/``map``/``sinkmap``/``halt`` lines.

    ``map <state> <E-edge> <F-edge|-> <next-state>`` where ``-`` emits nothing.
    """
    states: list[str] = []
    initial = None
    trans: dict = {}
    sink_out: dict = {}
    halt: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "state" and len(parts) in (2, 3):
                if parts[1] in states:
                    raise GraphSyntaxError(f"duplicate state {parts[1]!r}", lineno)
                states.append(parts[1])
                if len(parts) == 3:
                    if parts[2] != "initial" or initial is not None:
                        raise GraphSyntaxError("bad or repeated 'initial' marker", lineno)
                    initial = parts[1]
            elif parts[0] == "map" and len(parts) == 5:
                q, e, f, n = parts[1:]
                if (q, e) in trans:
                    raise GraphSyntaxError(f"duplicate transition ({q}, {e})", lineno)
                trans[(q, e)] = (() if f == "-" else (f,), n)
            elif parts[0] == "sinkmap" and len(parts) == 4:
                sink_out[(parts[1], parts[2])] = parse_point(target, parts[3])
            elif parts[0] == "halt" and len(parts) == 3:
                halt[parts[1]] = parse_point(target, parts[2])
            else:
                raise GraphSyntaxError(f"cannot parse {line!r}", lineno)
        except GraphSyntaxError:
            raise
        except Exception as exc:
            raise GraphSyntaxError(str(exc), lineno) from exc
    if initial is None:
        if not states:
            raise GraphSyntaxError("no states declared")
        initial = states[0]
    return Transducer(source, target, states, initial, trans, sink_out, halt, name)


def format_transducer(T: Transducer) -> str:
    lines = []
    for q in T.states:
        lines.append(f"state {q}" + (" initial" if q == T.initial else ""))
    for (q, e), (o, n) in T.trans.items():
        lines.append(f"map {q} {e} {o[0] if o else '-'} {n}")
    for (q, v), p in T.sink_out.items():
        lines.append(f"sinkmap {q} {v} {format_point(p)}")
    for q, p in T.halt.items():
        lines.append(f"halt {q} {format_point(p)}")
    return "\n".join(lines) + "\n"
