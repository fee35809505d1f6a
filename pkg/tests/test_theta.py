import itertools
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from theta_calc import theta as th


def objects(level, max_degree):
    return st.sampled_from(th.objects_up_to(level, max_degree))


def brute_delta_hom(m, q):
    # monotone maps [m] -> [q]
    return [v for v in itertools.product(range(q + 1), repeat=m + 1)
            if all(v[i] <= v[i + 1] for i in range(m))]


@pytest.mark.parametrize("m,q", [(m, q) for m in range(5) for q in range(5)])
def test_delta_hom_counts(m, q):
    maps = th.hom_enumerate(th.simplex(m), th.simplex(q))
    assert len(maps) == comb(q + m + 1, m + 1) == len(brute_delta_hom(m, q))
    assert sorted(tuple(f.delta) for f in maps) == sorted(brute_delta_hom(m, q))


def test_theta2_small_counts():
    a = th.parse_object("[1]([1])", 2)
    assert len(th.hom_enumerate(a, a)) == 5
    assert len(th.hom_enumerate(th.terminal(2), a)) == 2
    b = th.parse_object("[1]([0])", 2)
    # [1]([0]) -> [1]([1]) picks a vertex of [1] for the single 1-cell, plus the two
    # constant maps at the endpoints
    assert len(th.hom_enumerate(b, a)) == 4


def test_theta0_is_terminal():
    star = th.terminal(0)
    assert th.hom_enumerate(star, star) == (th.identity(star),)
    assert th.objects_up_to(0, 5) == (star,)


def test_interning():
    assert th.parse_object("[2]", 1) is th.simplex(2)
    assert th.obj(2, th.simplex(1)) is th.parse_object("[[*]]", 2)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_category_laws(data):
    a = data.draw(objects(2, 3))
    b = data.draw(objects(2, 3))
    f = data.draw(st.sampled_from(th.hom_enumerate(a, b)))
    c = data.draw(objects(2, 3))
    g = data.draw(st.sampled_from(th.hom_enumerate(b, c)))
    d = data.draw(objects(2, 2))
    h = data.draw(st.sampled_from(th.hom_enumerate(c, d)))
    assert th.compose(h, th.compose(g, f)) is th.compose(th.compose(h, g), f)
    assert th.compose(f, th.identity(a)) is f
    assert th.compose(th.identity(b), f) is f


def probe_mono(f, max_degree):
    # cancellable against every pair of maps from small probes
    for t in th.objects_up_to(f.level, max_degree):
        images = [th.compose(f, g) for g in th.hom_enumerate(t, f.source)]
        if len(set(images)) != len(images):
            return False
    return True


@pytest.mark.parametrize("level", [1, 2])
def test_mono_matches_probe_oracle(level):
    objs = th.objects_up_to(level, 3)
    for a in objs:
        for b in objs:
            for f in th.hom_enumerate(a, b):
                assert th.is_mono(f) == probe_mono(f, a.degree + 1), f


@pytest.mark.parametrize("level", [1, 2, 3])
def test_codegeneracy_sections(level):
    for a in th.objects_up_to(level, 3):
        for sigma, s in th.codegeneracies_with_sections(a):
            assert th.compose(sigma, s) is th.identity(sigma.target)
            assert th.is_split_epi(sigma) and not th.is_mono(sigma)
            assert sigma.target.degree == a.degree - 1


def test_theta2_codegeneracy_kinds():
    a = th.parse_object("[2]([1],[0])", 2)
    targets = sorted(th.object_to_str(s.target) for s in th.elementary_codegeneracies(a))
    # one vertical (inside c_1), one horizontal (c_2 has degree 0)
    assert targets == sorted(['[[],[]]', '[["*"]]'])


@pytest.mark.parametrize("level", [1, 2, 3])
def test_epi_mono_factorization(level):
    objs = th.objects_up_to(level, 2 if level == 3 else 3)
    for a in objs:
        for b in objs:
            for f in th.hom_enumerate(a, b):
                e, m = th.factor_epi_mono(f)
                assert th.compose(m, e) is f
                assert th.is_mono(m)
                assert th.is_split_epi(e)


def test_classify_iso_only_identity():
    for a in th.objects_up_to(2, 3):
        for f in th.hom_enumerate(a, a):
            assert th.classify(f).iso == (f is th.identity(a))


def test_elementary_faces_of_simplex():
    faces = th.elementary_faces(th.simplex(3))
    assert sorted(tuple(u.delta) for u in faces) == sorted(
        tuple(th.coface(3, i).delta) for i in range(4))


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_json_roundtrip(data):
    level = data.draw(st.integers(0, 3))
    a = data.draw(objects(level, 3))
    b = data.draw(objects(level, 3))
    assert th.object_from_json(th.object_to_json(a), level) is a
    assert th.parse_object(th.object_to_str(a), level) is a
    for f in th.hom_enumerate(a, b)[:5]:
        assert th.morphism_from_json(th.morphism_to_json(f), a, b) is f


def test_bracket_notation():
    assert th.parse_object("[2]([1], [0])", 2) is th.obj(2, th.simplex(1), th.terminal(1))
    assert th.parse_object("[1]", 2) is th.obj(2, th.terminal(1))
    with pytest.raises(ValueError):
        th.parse_object("[2]([1])", 2)
    with pytest.raises(ValueError):
        th.parse_object("[1]([1", 2)
