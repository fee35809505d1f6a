import itertools
import random

import pytest

from theta_calc import theta as th
from theta_calc.enriched import UA, nerve
from theta_calc.lifting import (
    CSS_SITE, ENerve, MapFamilySpec, a_bracket, a_bracket_marked, bracket_map, coproduct_map,
    css_acyclic_family, delta_p_marked, enumerate_family, extend_map, family_If, family_Ic,
    family_IOc, family_IOf, family_phi, family_Se, has_rlp, horn, mapping_object,
    reduced_reedy_generator, soa_factorize, spine, spine_marked, theta_sp_generators, _empty_zero,
)
from theta_calc.presheaf import (
    Empty, Extend, PresheafMap, Representable, Terminal, hom_set, is_iso_map, is_mono_map,
)
from theta_calc.random_instances import (
    random_discrete_space, random_map, random_presented, random_segal_precategory,
)
from theta_calc.reedy import fiber, level
from theta_calc.site import DELTA, Site

S = th.simplex
INNER = Site((1,))


@pytest.fixture(scope="module")
def css_family():
    return css_acyclic_family(3, 2, 4)


def monotone(k, m):
    return [v for v in itertools.product(range(m + 1), repeat=k + 1)
            if all(v[i] <= v[i + 1] for i in range(k))]


@pytest.mark.parametrize("m,k", [(m, k) for m in range(1, 4) for k in range(m + 1)])
def test_horn_counts(m, k):
    V = horn(m, k).source
    for j in range(3):
        # a simplex lies in the horn iff it misses a vertex other than k
        expect = [v for v in monotone(j, m) if set(v) | {k} != set(range(m + 1))]
        assert V.size((S(j),)) == len(expect)


def test_spine_sizes():
    assert spine(0).source.size((S(0),)) == 0
    assert spine(1).source.size((S(1),)) == 3
    assert spine(3).source.size((S(0),)) == 4


def test_e_nerve():
    E = ENerve(4)
    for k in range(4):
        assert E.size((S(k),)) == 2 ** (k + 1)
    assert len(hom_set(Representable(DELTA, (S(1),)), E)) == 4


def test_css_family_is_mono(css_family):
    assert len(css_family) == 36
    for mem in css_family:
        assert is_mono_map(mem.map), mem.params


@pytest.mark.parametrize("seed", range(8))
def test_discrete_maps_are_fibrations(seed, css_family):
    rng = random.Random(seed)
    X = random_discrete_space(rng, CSS_SITE)
    Y = random_discrete_space(rng, CSS_SITE)
    f = random_map(rng, X, Y)
    if f is None:
        return
    for mem in css_family:
        assert has_rlp(f, mem.map), mem.params


def test_space_direction_edge_is_not_fibrant(css_family):
    # an edge in the space factor is not a Kan complex: the outer horn V[2,0] has no filler
    X = Extend(Representable(DELTA, (S(1),)), CSS_SITE, (0,))
    f = hom_set(X, Terminal(CSS_SITE))[0]
    member = [m for m in css_family if m.params == {"kind": "spine", "m": 2, "k": 0, "p": 0}][0]
    v = has_rlp(f, member.map)
    assert not v.ok and v.witness is not None and v.squares >= 1
    inner_horn = [m for m in css_family if m.params == {"kind": "spine", "m": 2, "k": 1, "p": 0}][0]
    assert has_rlp(f, inner_horn.map)


def test_coproduct_of_fibrations(css_family):
    rng = random.Random(11)
    f = random_map(rng, random_discrete_space(rng, CSS_SITE), random_discrete_space(rng, CSS_SITE))
    g = random_map(rng, random_discrete_space(rng, CSS_SITE), random_discrete_space(rng, CSS_SITE))
    h = coproduct_map(f, g)
    for mem in css_family[:12]:
        assert has_rlp(h, mem.map)


@pytest.mark.parametrize("seed", range(20))
def test_surjectivity_iff(seed):
    rng = random.Random(seed)
    X = random_segal_precategory(rng, INNER)
    Y = random_segal_precategory(rng, INNER)
    f = random_map(rng, X, Y)
    if f is None:
        return
    star = (S(0), th.terminal(1))
    surjective = {f.apply(star, x) for x in X.elements(star)} == set(Y.elements(star))
    assert has_rlp(f, _empty_zero(INNER)).ok == surjective


@pytest.mark.parametrize("seed", range(10))
def test_fiber_decomposition(seed):
    rng = random.Random(seed)
    X = random_segal_precategory(rng, INNER)
    A = random_presented(rng, INNER, 2, 1)
    p = rng.randint(0, 2)
    B = a_bracket(A, p).pushout
    x0 = level(X, 0)
    objs = x0.elements(x0.site.terminal())
    rhs = sum(len(hom_set(A, fiber(X, p, vs))) for vs in itertools.product(objs, repeat=p + 1))
    assert len(hom_set(B, X)) == rhs


def test_marked_simplex():
    P = delta_p_marked(2, ("a", "b", "a"), ("a", "b", "c"), INNER)
    star = (S(0), th.terminal(1))
    assert P.diagram.size(star) == 3
    # the label c is adjoined as an isolated object
    assert len(P.objects()) == 3
    g = spine_marked(2, ("a", "b", "a"), ("a", "b", "c"), INNER)
    assert is_mono_map(g) and not is_iso_map(g)
    with pytest.raises(ValueError):
        delta_p_marked(1, ("a",))


def test_marked_bracket_counts():
    A = Representable(INNER, (S(1),))
    b = a_bracket_marked(A, 1, ("a", "b"), ("a", "b"))
    X = nerve(UA(A, "a", "b"))
    objs = X.objects()
    # the two object points go anywhere; the cell then lives in the fiber over them
    expect = sum(len(hom_set(A, fiber(X.diagram, 1, vs))) for vs in itertools.product(objs, repeat=2))
    assert len(hom_set(b.pushout, X.diagram)) == expect == 1 + 1 + 3 + 0


def test_family_sizes():
    assert len(theta_sp_generators(1, 1, 1)) == 4
    fi = family_If()
    assert len(fi) == 8
    assert isinstance(fi[0].map.source, Empty)
    fc = family_Ic()
    assert len(fc) == 5
    assert all(is_mono_map(m.map) for m in fc)
    assert len(family_Se(3, 1, 2)) == 1 + 2 + 1 + 3
    assert len(family_phi(("a", "b"), 1, INNER)) == 2 + 4
    assert len(enumerate_family(MapFamilySpec("I_c", {}))) == 5
    with pytest.raises(ValueError):
        enumerate_family(MapFamilySpec("bogus"))


def test_fixed_object_families():
    f = family_IOf(("a",), p_max=1)
    assert len(f) == 2 and all(is_mono_map(m.map) for m in f)
    c = family_IOc(("a", "b"), p_max=1)
    assert len(c) == 4
    assert all(is_mono_map(m.map) for m in c)


def test_reduction_counterexample():
    gen = [g for g in theta_sp_generators(1, 0, 1) if g.params["m"] == 1][0]
    r = reduced_reedy_generator(gen.map, 0)
    star = r.source.site.terminal()
    assert r.source.size(star) == 2 and r.target.size(star) == 1
    assert not is_mono_map(r)


def test_bracket_map_of_mono_is_mono():
    gen = theta_sp_generators(1, 1, 1)[-1]
    i = gen.map
    for p in range(3):
        g = bracket_map(i, a_bracket(i.source, p), a_bracket(i.target, p))
        assert is_mono_map(g)


def test_soa_point():
    site = Site((1,) + INNER.levels)
    f = PresheafMap(Empty(site), Terminal(site), lambda d, x: x)
    res = soa_factorize(f, [_empty_zero(INNER)])
    assert res.ok and res.stages_used == 1 and res.attachments == 1
    assert res.cell.then(res.remainder).key() == f.key()


def test_soa_spine():
    f = spine(2)
    res = soa_factorize(f, [spine(2), spine(1)], max_stages=3)
    assert res.ok and res.attachments == 1
    assert is_iso_map(res.remainder)
    assert res.cell.then(res.remainder).key() == f.key()


def test_soa_bounded_stop():
    f = spine(2)
    res = soa_factorize(f, [spine(2)], max_stages=0)
    assert not res.ok and res.remaining > 0 and res.stages_used == 0


def test_mapping_object():
    A = Representable(INNER, (S(1),))
    X = nerve(UA(A))
    x0 = level(X.diagram, 0)
    a, b = sorted(x0.elements(x0.site.terminal()), key=repr)
    for k in range(3):
        d = (S(k),)
        assert len(mapping_object(X, a, b, d)) == A.size(d)
        assert len(mapping_object(X, b, a, d)) == 0
        assert len(mapping_object(X, a, a, d)) == 1
    with pytest.raises(ValueError):
        mapping_object(X, "nope", a, (S(0),))


def test_extend_map_roundtrip():
    h = horn(2, 1)
    e = extend_map(h, CSS_SITE, (0,))
    assert is_mono_map(e)
    assert e.source.size((S(1), S(3))) == h.source.size((S(1),))
