"""Finite groupoid algebras of acyclic graphs.

For an acyclic graph the boundary-path space is finite, so the groupoid is
a finite principal groupoid and its convolution algebra is a direct sum of
full matrix algebras, one per orbit.  Elements of the algebra are complex
vectors indexed by groupoid elements.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import NotAcyclic, NotConjugacy, WitnessError
from .funcspace import LocallyConstantFn, precompose
from .graph import BoundaryPoint, cylinders_up_to, enumerate_points, format_point
from .groupoid import GroupoidElement, cocycle_eval, minimal_witness
from .homcheck import Homeomorphism, check_conjugacy, require_homeomorphism
from .system import DRSystem

TOL = 1e-9


class FiniteGroupoid:
    """All elements of the groupoid of an acyclic graph, with multiplication tables."""

    def __init__(self, sys: DRSystem, elements: list[GroupoidElement]):
        self.sys = sys
        self.elements = elements
        self.index = {g: i for i, g in enumerate(elements)}
        self.points = sorted({g.x for g in elements}, key=lambda x: (x.description_length, x))
        self.units = [self.index[GroupoidElement(x, 0, x, 0, 0)] for x in self.points]
        self.inverse = np.array([self.index[GroupoidElement(g.y, -g.p, g.x, g.n, g.m)] for g in elements])
        by_range: dict[BoundaryPoint, list[int]] = {}
        for i, g in enumerate(elements):
            by_range.setdefault(g.x, []).append(i)
        I, J, K = [], [], []
        for i, g in enumerate(elements):
            for j in by_range.get(g.y, []):
                h = elements[j]
                I.append(i)
                J.append(j)
                K.append(self.index[GroupoidElement(g.x, g.p + h.p, h.y, 0, 0)])
        self.comp_i = np.array(I, dtype=int)
        self.comp_j = np.array(J, dtype=int)
        self.comp_k = np.array(K, dtype=int)

    def __len__(self) -> int:
        return len(self.elements)

    @cached_property
    def product_table(self) -> dict[tuple[int, int], int]:
        return {(int(i), int(j)): int(k) for i, j, k in zip(self.comp_i, self.comp_j, self.comp_k)}

    @property
    def is_principal(self) -> bool:
        return all(g.is_unit for g in self.elements if g.x == g.y)

    def check_associative(self, limit: int = 200_000) -> bool:
        table = self.product_table
        after: dict[int, list[tuple[int, int]]] = {}
        for (j, k), jk in table.items():
            after.setdefault(j, []).append((k, jk))
        checked = 0
        for (i, j), ij in table.items():
            for k, jk in after.get(j, []):
                if table.get((ij, k)) != table.get((i, jk)):
                    return False
                checked += 1
                if checked > limit:
                    return True
        return True

    def delta(self, g: GroupoidElement) -> "ConvElement":
        v = np.zeros(len(self), dtype=complex)
        v[self.index[g]] = 1
        return ConvElement(self, v)

    def zero(self) -> "ConvElement":
        return ConvElement(self, np.zeros(len(self), dtype=complex))

    def cocycle_vector(self, f: LocallyConstantFn) -> np.ndarray:
        return np.array([cocycle_eval(self.sys, f, g) for g in self.elements], dtype=int)


def build_full_groupoid(sys: DRSystem) -> FiniteGroupoid:
    g = sys.graph
    if not g.is_acyclic:
        raise NotAcyclic(f"graph {g.name or ''} has a cycle; its groupoid is infinite")
    points = enumerate_points(g, g.longest_path_length())
    elements = []
    for x in points:
        for y in points:
            p = len(x.prefix) - len(y.prefix)
            w = minimal_witness(sys, x, p, y)
            if w is not None:
                elements.append(GroupoidElement(x, p, y, *w))
    return FiniteGroupoid(sys, elements)


@dataclass
class ConvElement:
    G: FiniteGroupoid
    coeffs: np.ndarray

    def __add__(self, other: "ConvElement") -> "ConvElement":
        return ConvElement(self.G, self.coeffs + other.coeffs)

    def __sub__(self, other: "ConvElement") -> "ConvElement":
        return ConvElement(self.G, self.coeffs - other.coeffs)

    def __rmul__(self, s) -> "ConvElement":
        return ConvElement(self.G, s * self.coeffs)

    def __matmul__(self, other: "ConvElement") -> "ConvElement":
        return convolve(self.G, self, other)

    def norm(self) -> float:
        return float(np.max(np.abs(self.coeffs), initial=0.0))

    def close_to(self, other: "ConvElement", tol: float = TOL) -> bool:
        return (self - other).norm() < tol


def convolve(G: FiniteGroupoid, xi: ConvElement, eta: ConvElement) -> ConvElement:
    """(xi * eta)(g) = sum over g1 g2 = g of xi(g1) eta(g2)."""
    if len(xi.coeffs) != len(G) or len(eta.coeffs) != len(G):
        raise ValueError("dimension mismatch")
    out = np.zeros(len(G), dtype=complex)
    np.add.at(out, G.comp_k, xi.coeffs[G.comp_i] * eta.coeffs[G.comp_j])
    return ConvElement(G, out)


def star(G: FiniteGroupoid, xi: ConvElement) -> ConvElement:
    return ConvElement(G, np.conj(xi.coeffs[G.inverse]))


@dataclass
class Block:
    points: list[BoundaryPoint]
    units: dict[tuple[int, int], int] = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.points)


def block_decomposition(G: FiniteGroupoid) -> list[Block]:
    """One block per orbit; ``units[(a, b)]`` indexes the matrix unit e_ab."""
    if not G.is_principal:
        raise ValueError("groupoid is not principal")
    orbit_of: dict[BoundaryPoint, int] = {}
    orbits: list[list[BoundaryPoint]] = []
    for x in G.points:
        if x in orbit_of:
            continue
        members = [g.y for g in G.elements if g.x == x]
        members.sort(key=lambda z: G.points.index(z))
        for z in members:
            orbit_of[z] = len(orbits)
        orbits.append(members)
    blocks = []
    for members in orbits:
        pos = {z: k for k, z in enumerate(members)}
        units = {}
        for i, g in enumerate(G.elements):
            if g.x in pos and g.y in pos:
                units[(pos[g.x], pos[g.y])] = i
        blocks.append(Block(members, units))
    return blocks


def to_matrices(G: FiniteGroupoid, xi: ConvElement, blocks: list[Block] | None = None) -> list[np.ndarray]:
    blocks = blocks if blocks is not None else block_decomposition(G)
    out = []
    for b in blocks:
        m = np.zeros((b.size, b.size), dtype=complex)
        for (r, c), i in b.units.items():
            m[r, c] = xi.coeffs[i]
        out.append(m)
    return out


def check_matrix_units(G: FiniteGroupoid, blocks: list[Block]) -> float:
    """Largest deviation from e_ab e_cd = [b == c] e_ad over all blocks."""
    worst = 0.0
    for blk in blocks:
        n = blk.size
        for a in range(n):
            for b in range(n):
                e_ab = G.delta(G.elements[blk.units[(a, b)]])
                for c in range(n):
                    for d in range(n):
                        prod = convolve(G, e_ab, G.delta(G.elements[blk.units[(c, d)]]))
                        want = G.delta(G.elements[blk.units[(a, d)]]) if b == c else G.zero()
                        worst = max(worst, (prod - want).norm())
    return worst


# weighted actions ---------------------------------------------------------------------


def _check_unimodular(z: complex):
    if abs(abs(z) - 1) > 1e-12:
        raise ValueError(f"z = {z} is not on the unit circle")


def weighted_action(G: FiniteGroupoid, f: LocallyConstantFn, z: complex, xi: ConvElement) -> ConvElement:
    """Scale the coefficient at g by z ** c_f(g)."""
    _check_unimodular(z)
    c = G.cocycle_vector(f)
    return ConvElement(G, xi.coeffs * np.power(complex(z), c.astype(float)))


def full_indicator_family(graph, depth: int) -> list[LocallyConstantFn]:
    return [LocallyConstantFn.indicator(graph, c) for c in cylinders_up_to(graph, depth)]


def circle_samples(max_degree: int, seed: int = 0, minimum: int = 8) -> list[complex]:
    """Roots of unity of order max(minimum, 2 max_degree + 1) plus two seeded random points."""
    n = max(minimum, 2 * max_degree + 1)
    zs = [cmath.exp(2j * cmath.pi * k / n) for k in range(n)]
    rng = np.random.default_rng(seed)
    zs += [cmath.exp(2j * cmath.pi * float(t)) for t in rng.random(2)]
    return zs


@dataclass
class FixedPointReport:
    basis: list[GroupoidElement]
    is_diagonal: bool
    residual: float
    samples: int
    weights: int


def fixed_point_intersection(
    G: FiniteGroupoid, weights: list[LocallyConstantFn], samples: list[complex] | None = None, seed: int = 0
) -> FixedPointReport:
    """Elements fixed by every weighted action in the list, at every sampled z.

    The actions are diagonal in the point-mass basis, so the common fixed space
    is spanned by the point masses whose eigenvalues are all 1.
    """
    vecs = [G.cocycle_vector(f) for f in weights]
    maxdeg = max((int(np.max(np.abs(v), initial=0)) for v in vecs), default=0)
    zs = samples if samples is not None else circle_samples(maxdeg, seed)
    for z in zs:
        _check_unimodular(z)
    fixed = np.ones(len(G), dtype=bool)
    for c in vecs:
        for z in zs:
            fixed &= np.abs(np.power(complex(z), c.astype(float)) - 1) < TOL
    basis_idx = [i for i in range(len(G)) if fixed[i]]
    # residual of the computed basis under every action
    residual = 0.0
    for c in vecs:
        for z in zs:
            if basis_idx:
                residual = max(residual, float(np.max(np.abs(np.power(complex(z), c[basis_idx].astype(float)) - 1))))
    return FixedPointReport(
        [G.elements[i] for i in basis_idx],
        sorted(basis_idx) == sorted(G.units),
        residual,
        len(zs),
        len(weights),
    )


# induced isomorphisms ---------------------------------------------------------------------


class StarIso:
    """phi(xi) = xi o psi^-1 for a bijection psi between two finite groupoids."""

    def __init__(self, GE: FiniteGroupoid, GF: FiniteGroupoid, perm: np.ndarray, h: Homeomorphism):
        self.GE, self.GF, self.perm, self.h = GE, GF, perm, h

    def __call__(self, xi: ConvElement) -> ConvElement:
        out = np.zeros(len(self.GF), dtype=complex)
        out[self.perm] = xi.coeffs
        return ConvElement(self.GF, out)

    def structure_residual(self, trials: int = 5, seed: int = 0) -> float:
        """Failure of multiplicativity and *-preservation; 0 for a true *-isomorphism."""
        GE, GF, perm = self.GE, self.GF, self.perm
        if len(GE) != len(GF) or len(set(perm.tolist())) != len(perm):
            return float("inf")
        worst = 0.0
        table = GF.product_table
        for i, j, k in zip(GE.comp_i, GE.comp_j, GE.comp_k):
            if table.get((int(perm[i]), int(perm[j]))) != perm[k]:
                return float("inf")
        if len(GE.comp_i) != len(GF.comp_i):
            return float("inf")
        rng = np.random.default_rng(seed)
        for _ in range(trials):
            a = ConvElement(GE, rng.normal(size=len(GE)) + 1j * rng.normal(size=len(GE)))
            b = ConvElement(GE, rng.normal(size=len(GE)) + 1j * rng.normal(size=len(GE)))
            worst = max(worst, (self(convolve(GE, a, b)) - convolve(GF, self(a), self(b))).norm())
            worst = max(worst, (self(star(GE, a)) - star(GF, self(a))).norm())
        return worst

    def maps_diagonal(self) -> bool:
        """Units go to units, and the unit at x goes to the unit at h(x)."""
        for i in self.GE.units:
            g = self.GE.elements[i]
            img = self.GF.elements[self.perm[i]]
            if not (img.is_unit and img.x == self.h(g.x)):
                return False
        return True

    def intertwining_residual(self, family: list[LocallyConstantFn], zs: list[complex]) -> tuple[float, tuple | None]:
        """max |phi(gamma^(g o h)_z d) - gamma^g_z phi(d)| over point masses d, g in family, z in zs."""
        worst, where = 0.0, None
        for g in family:
            gh = precompose(g, self.h.forward)
            ce = self.GE.cocycle_vector(gh)
            cf = self.GF.cocycle_vector(g)[self.perm]
            for z in zs:
                _check_unimodular(z)
                diff = np.abs(np.power(complex(z), ce.astype(float)) - np.power(complex(z), cf.astype(float)))
                i = int(np.argmax(diff)) if len(diff) else 0
                if len(diff) and diff[i] > worst:
                    worst, where = float(diff[i]), (g, z, self.GE.elements[i])
        return worst, where


def leg_map_iso(h: Homeomorphism) -> StarIso:
    """The linear map induced by g = (x, p, y) -> the element of G_F from h(x) to h(y).

    Raises WitnessError when h does not preserve orbits, so no such element exists.
    """
    h = require_homeomorphism(h)
    sf = DRSystem(h.target)
    GE, GF = build_full_groupoid(DRSystem(h.source)), build_full_groupoid(sf)
    perm = []
    for g in GE.elements:
        hx, hy = h(g.x), h(g.y)
        p = len(hx.prefix) - len(hy.prefix)
        w = minimal_witness(sf, hx, p, hy)
        if w is None:
            raise WitnessError(f"no element of the target groupoid joins {format_point(hx)} to {format_point(hy)}")
        perm.append(GF.index[GroupoidElement(hx, p, hy, *w)])
    return StarIso(GE, GF, np.array(perm, dtype=int), h)


def induced_star_iso(h: Homeomorphism) -> StarIso:
    """phi(xi) = xi o psi^-1 with psi(x, p, y) = (h(x), p, h(y)); h must be a conjugacy."""
    h = require_homeomorphism(h)
    for g in (h.source, h.target):
        if not g.is_acyclic:
            raise NotAcyclic(f"graph {g.name or ''} has a cycle")
    verdict = check_conjugacy(h.forward, h.inverse)
    if not verdict.is_conjugacy:
        raise NotConjugacy(f"{verdict.failing_condition}: {verdict.witness}")
    phi = leg_map_iso(h)
    for i, g in enumerate(phi.GE.elements):
        assert phi.GF.elements[phi.perm[i]].p == g.p, "conjugacy changed a degree"
    return phi
