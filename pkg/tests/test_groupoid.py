from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from drsys import corpus
from drsys.errors import DomainError, NotComposable, NotConjugacy, WitnessError
from drsys.funcspace import LocallyConstantFn
from drsys.graph import Path, cylinders_up_to, enumerate_points, parse_path, parse_point
from drsys.groupoid import (
    compose,
    cocycle_eval,
    cocycle_with_witness,
    element,
    f_iterated,
    induced_iso,
    intertwine_check,
    inverse,
    isotropy_interior_trivial,
    make_element,
    minimal_witness,
    separating_check,
    separating_depth,
    separating_weight,
    unit,
)
from drsys.homcheck import Homeomorphism
from drsys.system import DRSystem

from oracles import points_of

O2 = corpus.graph("o2")
S = DRSystem(O2)


def pt(text, g=O2):
    return parse_point(g, text)


def hom(name):
    return Homeomorphism(*corpus.instance(name).transducers())


def ind(lit, g=O2):
    return LocallyConstantFn.indicator(g, parse_path(g, lit))


def random_element(sys, rng, pts):
    """Pick x, then y = a preimage chain of a shift of x, so (x, p, y) exists."""
    x = rng.choice(pts)
    m = rng.randint(0, 3)
    while not sys.in_domain(x, m):
        m -= 1
    z = sys.shift(x, m)
    y = z
    for _ in range(rng.randint(0, 3)):
        pre = sys.preimages(y)
        if not pre:
            break
        y = rng.choice(pre)
    n = next(k for k in range(10) if sys.in_domain(y, k) and sys.shift(y, k) == z)
    return make_element(sys, x, m, n, y)


def test_make_element_examples():
    ab = pt("(a.b)^w")
    g = make_element(S, ab, 1, 1, ab)
    assert g == unit(ab) and (g.m, g.n) == (0, 0)
    g = make_element(S, pt("a.(b)^w"), 1, 0, pt("(b)^w"))
    assert g.p == 1 and g.x == pt("a.(b)^w")
    with pytest.raises(WitnessError):
        make_element(S, pt("(a)^w"), 1, 1, pt("(b)^w"))
    with pytest.raises(DomainError):
        make_element(DRSystem(corpus.graph("p2")), pt("@w", corpus.graph("p2")), 1, 0, pt("@w", corpus.graph("p2")))


def test_witness_is_minimal_and_ignored_by_equality():
    x, y = pt("a.a.(b)^w"), pt("b.(b)^w")
    g = make_element(S, x, 5, 4, y)
    assert (g.m, g.n) == (2, 1)
    assert g == make_element(S, x, 3, 2, y)
    assert minimal_witness(S, x, 1, y) == (2, 1)
    assert minimal_witness(S, pt("(a)^w"), 0, pt("(b)^w")) is None


def test_compose_and_inverse_examples():
    g = make_element(S, pt("a.(b)^w"), 1, 0, pt("(b)^w"))
    assert compose(S, g, inverse(g)) == unit(g.x)
    assert compose(S, g, unit(pt("(b)^w"))) == g
    g1 = make_element(S, pt("a.a.(b)^w"), 1, 0, pt("a.(b)^w"))
    g12 = compose(S, g1, g)
    assert g12 == GroupoidElementLike(pt("a.a.(b)^w"), 2, pt("(b)^w"))
    assert S.shift(pt("a.a.(b)^w"), 2) == pt("(b)^w")
    with pytest.raises(NotComposable):
        compose(S, g, g)


def GroupoidElementLike(x, p, y):
    return element(S, x, p, y)


def test_f_iterated_examples():
    ab = pt("(a.b)^w")
    assert f_iterated(S, ind("a"), 3, ab) == 2
    assert f_iterated(S, ind("a"), 0, ab) == 0
    one = LocallyConstantFn.constant(O2, 1)
    for k in range(6):
        assert f_iterated(S, one, k, ab) == k
    p2 = corpus.graph("p2")
    with pytest.raises(DomainError):
        f_iterated(DRSystem(p2), LocallyConstantFn.constant(p2, 1), 2, pt("f", p2))


def test_cocycle_examples():
    g = make_element(S, pt("a.(b)^w"), 1, 0, pt("(b)^w"))
    assert cocycle_eval(S, LocallyConstantFn.constant(O2, 1), g) == 1
    assert cocycle_eval(S, ind("a"), g) == 1
    assert cocycle_eval(S, ind("a"), unit(pt("(a.b)^w"))) == 0


@pytest.mark.parametrize("name", ["o2", "o2_split", "loop_sink", "diamond"])
def test_cocycle_independent_of_witness(name):
    g = corpus.graph(name)
    s = DRSystem(g)
    rng = random.Random(8)
    pts = points_of(name, 5)
    cyls = cylinders_up_to(g, 2)
    for _ in range(200):
        el = random_element(s, rng, pts)
        f = LocallyConstantFn.from_terms(g, [(rng.choice(cyls), rng.randint(-4, 4)) for _ in range(3)])
        v = cocycle_eval(s, f, el, check=True)
        for j in range(1, 4):
            if s.in_domain(el.x, el.m + j) and s.in_domain(el.y, el.n + j):
                assert cocycle_with_witness(s, f, el, el.m + j, el.n + j) == v


@pytest.mark.parametrize("name", ["o2", "o2_split", "loop_sink"])
def test_cocycle_is_a_homomorphism(name):
    g = corpus.graph(name)
    s = DRSystem(g)
    rng = random.Random(9)
    pts = points_of(name, 5)
    cyls = cylinders_up_to(g, 2)
    for _ in range(100):
        g1 = random_element(s, rng, pts)
        # build a composable partner starting at the source of g1
        z = g1.y
        m = rng.randint(0, 2)
        while not s.in_domain(z, m):
            m -= 1
        w = s.shift(z, m)
        g2 = make_element(s, z, m, 0, w)
        f = LocallyConstantFn.from_terms(g, [(rng.choice(cyls), rng.randint(-4, 4)) for _ in range(3)])
        assert cocycle_eval(s, f, compose(s, g1, g2)) == cocycle_eval(s, f, g1) + cocycle_eval(s, f, g2)
        assert cocycle_eval(s, f, inverse(g1)) == -cocycle_eval(s, f, g1)
        assert compose(s, g1, g2).p == g1.p + g2.p


def test_induced_iso_examples():
    g = make_element(S, pt("a.(b)^w"), 1, 0, pt("(b)^w"))
    assert induced_iso(hom("o2_identity"))(g) == g
    img = induced_iso(hom("o2_swap"))(g)
    assert img == element(S, pt("b.(a)^w"), 1, pt("(a)^w"))
    with pytest.raises(NotConjugacy):
        induced_iso(hom("first_letter_swap"))


@pytest.mark.parametrize("name", ["o2_swap", "o2_split", "o3_cycle", "loop_sink_identity"])
def test_induced_iso_is_functorial(name):
    h = hom(name)
    psi = induced_iso(h)
    s = DRSystem(h.source)
    rng = random.Random(10)
    pts = points_of(h.source.name, 5)
    for _ in range(50):
        g1 = random_element(s, rng, pts)
        g2 = make_element(s, g1.y, 0, 0, g1.y)
        z = g1.y
        if s.in_domain(z, 1):
            g2 = make_element(s, z, 1, 0, s.shift(z, 1))
        sf = psi.sys_f
        assert psi(compose(s, g1, g2)) == compose(sf, psi(g1), psi(g2))
        assert psi(inverse(g1)) == inverse(psi(g1))
        assert psi(unit(g1.x)) == unit(h(g1.x))
        assert psi.inverse(psi(g1)) == g1


def test_intertwine_examples():
    assert intertwine_check(hom("o2_swap"), 2).ok
    assert intertwine_check(hom("o2_identity"), 3).ok
    r = intertwine_check(hom("first_letter_swap"), 1)
    assert not r.ok and r.witness == "cyl a" and r.witness_g == Path("v", ("a",))


@pytest.mark.parametrize("inst", [i for i in corpus.INSTANCES if i.conjugacy], ids=lambda i: i.name)
def test_every_conjugacy_intertwines(inst):
    assert intertwine_check(Homeomorphism(*inst.transducers()), 3).ok


def test_intertwine_violation_is_real():
    h = hom("first_letter_swap")
    r = intertwine_check(h, 2)
    g = LocallyConstantFn.indicator(O2, r.witness_g)
    x = r.witness_x
    lhs = g(h(x))
    rhs = cocycle_eval(S, g, element(S, h(x), 1, h(S.shift(x, 1))))
    assert lhs != rhs and (lhs, rhs) == (r.lhs, r.rhs)


def test_separating_examples():
    a, b = pt("(a)^w"), pt("(b)^w")
    assert separating_check(O2, [a, b], [b, a], 0)
    assert separating_check(O2, [a, b], [b, a], 5)
    assert not separating_check(O2, [a, a], [a], 1)
    assert not separating_check(O2, [pt("(a.b)^w")], [pt("(b.a)^w")], 2)


def test_separating_check_matches_indicator_sums():
    # oracle: literally sum every cylinder indicator of length <= depth
    rng = random.Random(12)
    pts = points_of("o2", 4)
    for _ in range(100):
        A = [rng.choice(pts) for _ in range(rng.randint(0, 3))]
        B = [rng.choice(pts) for _ in range(rng.randint(0, 3))]
        d = rng.randint(0, 3)
        want = all(
            sum(LocallyConstantFn.indicator(O2, c)(x) for x in A) == sum(LocallyConstantFn.indicator(O2, c)(x) for x in B)
            for c in cylinders_up_to(O2, d)
        )
        assert separating_check(O2, A, B, d) == want


def test_description_length_is_not_always_enough_to_separate():
    # two primitive lassos of description length 3 and 4 share their first 5 symbols
    x, y = pt("(a.a.b)^w"), pt("(a.a.b.a)^w")
    depth = max(x.description_length, y.description_length)
    assert separating_check(O2, [x], [y], depth)
    assert not separating_check(O2, [x], [y], separating_depth([x, y]))


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_separating_depth_decides_multiset_equality(data):
    pts = points_of("o2_split", 5)
    A = data.draw(st.lists(st.sampled_from(pts), max_size=4))
    B = data.draw(st.one_of(st.permutations(A), st.lists(st.sampled_from(pts), max_size=4)))
    d = separating_depth(list(A) + list(B))
    assert separating_check(corpus.graph("o2_split"), A, B, d) == (sorted(A) == sorted(B))


def test_separating_weight_for_same_tail_pairs():
    rng = random.Random(13)
    pts = points_of("o2", 5)
    for _ in range(100):
        x = rng.choice(pts)
        k = rng.randint(0, 3)
        z = S.shift(x, k)
        y = z
        for _ in range(rng.randint(0, 3)):
            y = rng.choice(S.preimages(y))
        l = next(j for j in range(8) if S.shift(y, j) == z)
        if k == l and x == y:
            continue
        depth = separating_depth([x, y])
        c = separating_weight(S, x, k, y, l, depth)
        assert c is not None
        f = LocallyConstantFn.indicator(O2, c)
        assert f_iterated(S, f, k, x) != f_iterated(S, f, l, y)


def test_isotropy_interior_examples():
    assert isotropy_interior_trivial(S)
    assert not isotropy_interior_trivial(DRSystem(corpus.graph("loop")))
    assert isotropy_interior_trivial(DRSystem(corpus.graph("p2")))


def test_loop_isotropy_is_everything():
    # on a single loop every (x, p, x) is an element: the groupoid is Z over one point
    loop = corpus.graph("loop")
    s = DRSystem(loop)
    e = pt("(e)^w", loop)
    for p in range(-3, 4):
        assert element(s, e, p, e).p == p
