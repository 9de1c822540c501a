from __future__ import annotations

import random
from fractions import Fraction

import pytest

from drsys import corpus
from drsys.errors import GraphSyntaxError, SupportError, UnverifiedMapError
from drsys.funcspace import (
    LocallyConstantFn,
    check_prop_sigma,
    evaluate,
    format_function,
    parse_function,
    pullback,
    refine,
    sigma_lower_star,
    sigma_upper_star,
)
from drsys.graph import Path, cylinders_up_to, parse_path, parse_point
from drsys.homcheck import Homeomorphism
from drsys.system import DRSystem

from oracles import points_of, random_points

O2 = corpus.graph("o2")
P2 = corpus.graph("p2")


def ind(g, lit, value=1):
    return LocallyConstantFn.indicator(g, parse_path(g, lit), value)


def hom(name):
    return Homeomorphism(*corpus.instance(name).transducers())


def random_fn(g, rng, depth=3, terms=4):
    cyls = cylinders_up_to(g, depth)
    return LocallyConstantFn.from_terms(
        g, [(rng.choice(cyls), Fraction(rng.randint(-5, 5), rng.randint(1, 3))) for _ in range(terms)]
    )


def test_evaluate_examples():
    assert evaluate(ind(O2, "a"), parse_point(O2, "(a.b)^w")) == 1
    assert evaluate(ind(O2, "a"), parse_point(O2, "(b.a)^w")) == 0
    f = ind(O2, "a.a", 2) + ind(O2, "a.b", 3)
    assert evaluate(f, parse_point(O2, "a.(b)^w")) == 3


def test_from_terms_sums_overlaps_pointwise():
    rng = random.Random(0)
    cyls = cylinders_up_to(O2, 3)
    for _ in range(30):
        terms = [(rng.choice(cyls), rng.randint(-3, 3)) for _ in range(5)]
        f = LocallyConstantFn.from_terms(O2, terms)
        for x in points_of("o2", 4):
            want = sum(v for c, v in terms if x.expand(len(c)) == c.edges)
            assert f(x) == want


def test_overlapping_constructor_rejected():
    with pytest.raises(ValueError):
        LocallyConstantFn(O2, {Path("v", ("a",)): 1, Path("v", ("a", "b")): 2})


def test_refine_examples():
    f, g = ind(O2, "a"), ind(O2, "a.b") + ind(O2, "b.a")
    fa, ga, cells = refine(f, g)
    assert len(cells) == 4
    for x in random_points("o2", 20, seed=2):
        cell = next(c for c in cells if x.expand(2) == c.edges)
        assert fa[cell] == f(x) and ga[cell] == g(x)
    zero = LocallyConstantFn(O2)
    z, g2, _ = refine(zero, g)
    assert all(v == 0 for v in z.values())


def test_arithmetic_is_pointwise():
    rng = random.Random(1)
    for _ in range(20):
        f, g = random_fn(O2, rng), random_fn(O2, rng)
        s = Fraction(rng.randint(-4, 4), 3)
        for x in points_of("o2", 4):
            assert (f + g)(x) == f(x) + g(x)
            assert (f * g)(x) == f(x) * g(x)
            assert (s * f - g)(x) == s * f(x) - g(x)
        assert f + g == g + f
        assert f * (g + f) == f * g + f * f


def test_sigma_upper_star_examples():
    assert sigma_upper_star(DRSystem(P2), ind(P2, "@w")) == ind(P2, "f")
    assert sigma_upper_star(DRSystem(O2), ind(O2, "a")) == ind(O2, "a.a") + ind(O2, "b.a")
    assert sigma_upper_star(DRSystem(O2), LocallyConstantFn(O2)).is_zero()


def test_sigma_lower_star_examples():
    assert sigma_lower_star(DRSystem(O2), ind(O2, "a")) == LocallyConstantFn.constant(O2, 1)
    assert sigma_lower_star(DRSystem(P2), ind(P2, "f")) == ind(P2, "@w")
    assert sigma_lower_star(DRSystem(O2), LocallyConstantFn(O2)).is_zero()
    with pytest.raises(SupportError):
        sigma_lower_star(DRSystem(P2), ind(P2, "@w"))


@pytest.mark.parametrize("name", ["o2", "o2_split", "loop_sink", "diamond", "tree3"])
def test_shift_operators_match_definitions(name):
    g = corpus.graph(name)
    s = DRSystem(g)
    rng = random.Random(3)
    pts = points_of(name, 4)
    for _ in range(10):
        f = random_fn(g, rng)
        up = sigma_upper_star(s, f)
        for x in pts:
            want = f(s.shift(x, 1)) if s.in_domain(x, 1) else 0
            assert up(x) == want
        dom_f = f * LocallyConstantFn.from_terms(g, [(Path(g.src(e), (e,)), 1) for e in g.edge_ids])
        down = sigma_lower_star(s, dom_f)
        for x in pts:
            assert down(x) == sum(dom_f(z) for z in s.preimages(x))


def test_lower_after_upper_doubles_on_two_loops():
    s = DRSystem(O2)
    rng = random.Random(4)
    for _ in range(20):
        f = random_fn(O2, rng)
        assert sigma_lower_star(s, sigma_upper_star(s, f)) == f.scale(2)


def test_operators_are_linear():
    rng = random.Random(5)
    for name in ("o2", "loop_sink"):
        g = corpus.graph(name)
        s = DRSystem(g)
        dom = LocallyConstantFn.from_terms(g, [(Path(g.src(e), (e,)), 1) for e in g.edge_ids])
        for _ in range(10):
            f, h = random_fn(g, rng) * dom, random_fn(g, rng) * dom
            a, b = Fraction(rng.randint(-5, 5), 2), rng.randint(-3, 3)
            assert sigma_upper_star(s, a * f + b * h) == a * sigma_upper_star(s, f) + b * sigma_upper_star(s, h)
            assert sigma_lower_star(s, a * f + b * h) == a * sigma_lower_star(s, f) + b * sigma_lower_star(s, h)


def test_pullback_examples():
    assert pullback(hom("o2_identity"), ind(O2, "a")) == ind(O2, "a")
    assert pullback(hom("o2_swap"), ind(O2, "a")) == ind(O2, "b")
    assert pullback(hom("first_letter_swap"), ind(O2, "a.a")) == ind(O2, "b.a")
    with pytest.raises(UnverifiedMapError):
        pullback(corpus.instance("o2_swap").transducers()[0], ind(O2, "a"))


@pytest.mark.parametrize("inst", [i for i in corpus.INSTANCES if i.homeomorphism], ids=lambda i: i.name)
def test_pullback_is_precomposition_with_inverse(inst):
    h = Homeomorphism(*inst.transducers())
    rng = random.Random(6)
    ys = points_of(inst.target, 4)
    for _ in range(5):
        f = random_fn(h.source, rng)
        pf = pullback(h, f)
        for y in ys:
            assert pf(y) == f(h.inv(y))


def test_pullback_is_a_ring_map():
    rng = random.Random(7)
    for name in ("first_letter_swap", "o2_split", "odometer"):
        h = hom(name)
        for _ in range(10):
            f, g = random_fn(h.source, rng), random_fn(h.source, rng)
            assert pullback(h, f * g) == pullback(h, f) * pullback(h, g)
            assert pullback(h, f + g) == pullback(h, f) + pullback(h, g)
            fc = f.scale(complex(1, 2))
            assert pullback(h, fc.conj()) == pullback(h, fc).conj()


def test_check_prop_sigma_examples():
    r = check_prop_sigma(DRSystem(O2), DRSystem(O2), hom("o2_swap"), 2)
    assert r.cond_upper and r.cond_lower
    r = check_prop_sigma(DRSystem(O2), DRSystem(O2), hom("first_letter_swap"), 2)
    assert not r.cond_upper and not r.cond_lower
    f, g, x = r.witness_upper
    h = hom("first_letter_swap")
    sf = DRSystem(O2)
    lhs = pullback(h, sigma_upper_star(sf, f) * g)
    rhs = sigma_upper_star(sf, pullback(h, f)) * pullback(h, g)
    assert lhs(x) != rhs(x)
    pt, loop = corpus.graph("pt"), corpus.graph("loop")
    r = check_prop_sigma(DRSystem(pt), DRSystem(loop), hom("pt_to_loop"), 1)
    assert not r.cond_upper and not r.cond_lower
    # the lower condition fails through the support requirement
    assert r.witness_lower[1] is None and r.witness_lower[2] == parse_point(pt, "@v")


def test_check_prop_sigma_requires_verified_map():
    T, _ = corpus.instance("o2_swap").transducers()
    with pytest.raises(UnverifiedMapError):
        check_prop_sigma(DRSystem(O2), DRSystem(O2), T, 1)


def test_function_file_format():
    text = "# weights\ncyl a 2\ncyl a.b 1/3\ncyl @v 1+2i\n"
    f = parse_function(text, O2)
    x = parse_point(O2, "a.(b)^w")
    assert f(x) == 2 + Fraction(1, 3) + complex(1, 2)
    g = parse_function(format_function(f), O2)
    assert g == f
    p = parse_function("cyl f@w 5\ncyl @w -1\n", P2)
    assert p(parse_point(P2, "f")) == 5 and p(parse_point(P2, "@w")) == -1
    with pytest.raises(GraphSyntaxError) as info:
        parse_function("cyl a 1\ncyl a.c 2\n", O2)
    assert info.value.line == 2
