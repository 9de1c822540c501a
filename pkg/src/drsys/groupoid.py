"""The groupoid of a boundary-path system, integer cocycles and their checks.

Elements are triples (x, p, y) with shift^m(x) == shift^n(y) and p = m - n.
The stored witness (m, n) is always the least one for the given degree;
equality and hashing ignore it.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .errors import DomainError, NotComposable, NotConjugacy, WitnessError
from .funcspace import LocallyConstantFn, evaluate
from .graph import BoundaryPoint, Cylinder, Path, cylinders_up_to, enumerate_points, format_point, some_point
from .homcheck import Homeomorphism, check_conjugacy, require_homeomorphism
from .system import DRSystem


@dataclass(frozen=True)
class GroupoidElement:
    x: BoundaryPoint
    p: int
    y: BoundaryPoint
    m: int = field(compare=False)
    n: int = field(compare=False)

    @property
    def range(self) -> BoundaryPoint:
        return self.x

    @property
    def source(self) -> BoundaryPoint:
        return self.y

    @property
    def is_unit(self) -> bool:
        return self.p == 0 and self.x == self.y

    def __str__(self) -> str:
        return f"({format_point(self.x)}, {self.p}, {format_point(self.y)}; {self.m}, {self.n})"


def _shift_or_none(sys: DRSystem, x: BoundaryPoint, k: int):
    return sys.shift(x, k) if sys.in_domain(x, k) else None


def make_element(sys: DRSystem, x: BoundaryPoint, m: int, n: int, y: BoundaryPoint) -> GroupoidElement:
    """The element (x, m - n, y) certified by shift^m(x) == shift^n(y)."""
    if m < 0 or n < 0:
        raise ValueError("witness exponents must be nonnegative")
    for pt, k in ((x, m), (y, n)):
        if not sys.in_domain(pt, k):
            raise DomainError(f"{format_point(pt)} is not in the domain of shift^{k}")
    if sys.shift(x, m) != sys.shift(y, n):
        raise WitnessError(f"shift^{m}({format_point(x)}) != shift^{n}({format_point(y)})")
    while m > 0 and n > 0 and sys.shift(x, m - 1) == sys.shift(y, n - 1):
        m, n = m - 1, n - 1
    return GroupoidElement(x, m - n, y, m, n)


def minimal_witness(sys: DRSystem, x: BoundaryPoint, p: int, y: BoundaryPoint) -> tuple[int, int] | None:
    """Least (m, n) with m - n == p and shift^m(x) == shift^n(y), if any."""
    bound = x.description_length + y.description_length + abs(p) + 1
    for m in range(max(p, 0), bound + max(p, 0) + 1):
        n = m - p
        a, b = _shift_or_none(sys, x, m), _shift_or_none(sys, y, n)
        if a is None or b is None:
            # m and n only grow from here
            break
        if a == b:
            return m, n
    return None


def element(sys: DRSystem, x: BoundaryPoint, p: int, y: BoundaryPoint) -> GroupoidElement:
    w = minimal_witness(sys, x, p, y)
    if w is None:
        raise WitnessError(f"({format_point(x)}, {p}, {format_point(y)}) is not a groupoid element")
    return GroupoidElement(x, p, y, *w)


def unit(x: BoundaryPoint) -> GroupoidElement:
    return GroupoidElement(x, 0, x, 0, 0)


def compose(sys: DRSystem, g1: GroupoidElement, g2: GroupoidElement) -> GroupoidElement:
    if g1.y != g2.x:
        raise NotComposable(f"source of {g1} is not the range of {g2}")
    # shift the middle point far enough for both witnesses to apply
    k = max(g1.n, g2.m)
    return make_element(sys, g1.x, g1.m + k - g1.n, g2.n + k - g2.m, g2.y)


def inverse(g: GroupoidElement) -> GroupoidElement:
    return GroupoidElement(g.y, -g.p, g.x, g.n, g.m)


# cocycles --------------------------------------------------------------------------


def f_iterated(sys: DRSystem, f: LocallyConstantFn, k: int, x: BoundaryPoint) -> int:
    """Sum of f(shift^i(x)) over i < k."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if not sys.in_domain(x, k):
        raise DomainError(f"{format_point(x)} is not in the domain of shift^{k}")
    total = 0
    for i in range(k):
        total += evaluate(f, sys.shift(x, i))
    return total


def cocycle_eval(sys: DRSystem, f: LocallyConstantFn, g: GroupoidElement, check: bool = False) -> int:
    """c_f(g) = f^(m)(x) - f^(n)(y) for the stored witness."""
    value = f_iterated(sys, f, g.m, g.x) - f_iterated(sys, f, g.n, g.y)
    if check and sys.in_domain(g.x, g.m + 1) and sys.in_domain(g.y, g.n + 1):
        again = f_iterated(sys, f, g.m + 1, g.x) - f_iterated(sys, f, g.n + 1, g.y)
        assert again == value, "cocycle value depends on the witness"
    return value


def cocycle_with_witness(sys: DRSystem, f: LocallyConstantFn, g: GroupoidElement, m: int, n: int) -> int:
    """c_f(g) computed through an explicit (not necessarily minimal) witness."""
    if m - n != g.p or sys.shift(g.x, m) != sys.shift(g.y, n):
        raise WitnessError(f"({m}, {n}) does not witness {g}")
    return f_iterated(sys, f, m, g.x) - f_iterated(sys, f, n, g.y)


def canonical_cocycle(g: GroupoidElement) -> int:
    return g.p


# induced isomorphism -----------------------------------------------------------------


class InducedIso:
    """psi(x, p, y) = (h(x), p, h(y)) for a conjugacy h."""

    def __init__(self, h: Homeomorphism):
        self.h = require_homeomorphism(h)
        verdict = check_conjugacy(h.forward, h.inverse)
        if not verdict.is_conjugacy:
            raise NotConjugacy(f"{verdict.failing_condition}: {verdict.witness}")
        self.sys_e = DRSystem(h.source)
        self.sys_f = DRSystem(h.target)

    def __call__(self, g: GroupoidElement) -> GroupoidElement:
        return make_element(self.sys_f, self.h(g.x), g.m, g.n, self.h(g.y))

    def inverse(self, g: GroupoidElement) -> GroupoidElement:
        return make_element(self.sys_e, self.h.inv(g.x), g.m, g.n, self.h.inv(g.y))


def induced_iso(h: Homeomorphism) -> InducedIso:
    return InducedIso(h)


@dataclass
class IntertwineReport:
    ok: bool
    depth: int
    checked: int
    witness_g: Cylinder | None = None
    witness_x: BoundaryPoint | None = None
    lhs: int | None = None
    rhs: int | None = None

    @property
    def witness(self) -> str | None:
        return None if self.witness_g is None else f"cyl {self.witness_g}"


def _sample_domain_points(sys: DRSystem, depth: int) -> list[BoundaryPoint]:
    g = sys.graph
    pts = {x for x in enumerate_points(g, max(depth, 1) + 1) if sys.in_domain(x, 1)}
    for c in cylinders_up_to(g, depth):
        x = some_point(g, c)
        if sys.in_domain(x, 1):
            pts.add(x)
    return sorted(pts, key=lambda x: (x.description_length, x))


def intertwine_check(h: Homeomorphism, depth: int) -> IntertwineReport:
    """Compare c_(g o h)(x, 1, shift x) with c_g(h x, 1, h shift x).

    g runs over the indicators of F-cylinders of length <= depth (shortest
    first), x over a sample of dom(shift) covering every E-cylinder of length
    <= depth.  The right side uses the least witness of the image element.
    """
    h = require_homeomorphism(h)
    se, sf = DRSystem(h.source), DRSystem(h.target)
    xs = _sample_domain_points(se, depth)
    images = []
    for x in xs:
        sx = se.shift(x, 1)
        images.append((x, h(x), element(sf, h(x), 1, h(sx))))
    checked = 0
    for c in cylinders_up_to(h.target, depth):
        gfn = LocallyConstantFn.indicator(h.target, c)
        for x, hx, img in images:
            checked += 1
            lhs = evaluate(gfn, hx)
            rhs = cocycle_eval(sf, gfn, img)
            if lhs != rhs:
                return IntertwineReport(False, depth, checked, c, x, lhs, rhs)
    return IntertwineReport(True, depth, checked)


# separating families ---------------------------------------------------------------


def separating_check(graph, A: Iterable[BoundaryPoint], B: Iterable[BoundaryPoint], depth: int) -> bool:
    """Whether every cylinder indicator of length <= depth has equal sums over A and B.

    The sum of 1_Z(mu) over a multiset counts the points beginning with mu,
    so comparing prefix counts is the same test.
    """

    def counts(points):
        c: Counter = Counter()
        for x in points:
            o = graph.origin(x)
            syms = x.expand(depth)
            for k in range(len(syms) + 1):
                c[(o, syms[:k])] += 1
        return c

    return counts(A) == counts(B)


def separating_depth(points: Iterable[BoundaryPoint]) -> int:
    """A depth at which prefix counts decide multiset equality for these points.

    Distinct finite points are told apart by their full paths; two lassos
    agreeing on max_prefix + c1 + c2 symbols coincide (Fine and Wilf).
    """
    pts = list(points)
    fin = [len(x.prefix) for x in pts if x.is_finite]
    las = [x for x in pts if not x.is_finite]
    d = max(fin, default=0)
    if las:
        cyc = sorted((len(x.cycle) for x in las), reverse=True)
        c2 = cyc[1] if len(cyc) > 1 else cyc[0]
        d = max(d, max(len(x.prefix) for x in las) + cyc[0] + c2)
    return d


def separating_weight(
    sys: DRSystem, x: BoundaryPoint, k: int, y: BoundaryPoint, l: int, depth: int
) -> Cylinder | None:
    """A cylinder whose indicator f has f^(k)(x) != f^(l)(y), if one exists at ``depth``."""
    for c in cylinders_up_to(sys.graph, depth):
        f = LocallyConstantFn.indicator(sys.graph, c)
        if f_iterated(sys, f, k, x) != f_iterated(sys, f, l, y):
            return c
    return None


def isotropy_interior_trivial(sys: DRSystem) -> bool:
    """Whether the interior of the isotropy is just the unit space."""
    free = sys.is_topologically_free()
    if sys.graph.is_acyclic:
        from .cstar import build_full_groupoid

        G = build_full_groupoid(sys)
        assert all(g.is_unit for g in G.elements if g.x == g.y), "acyclic groupoid has isotropy"
    return free
