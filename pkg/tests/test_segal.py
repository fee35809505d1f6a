import itertools
import random

import pytest

from theta_calc import theta as th
from theta_calc.enriched import EnrichedFunctor, Nerve, OrdinaryCategory, UA, nerve, nerve_map
from theta_calc.lifting import spine
from theta_calc.presheaf import (
    Discrete, Extend, Presented, PresheafMap, Product, Representable, Terminal, hom_set,
    is_iso_map,
)
from theta_calc.random_instances import random_presented, random_segal_precategory
from theta_calc.reedy import cosk0_unit, is_discrete0, level, level_map, outer_site
from theta_calc.segal import (
    Pi0, SpineProduct, dk_equivalence_check, homotopy_category, is_segal_strict,
    phi_construction, reduce_map, reduction, segal_map,
)
from theta_calc.site import DELTA, Site, Window

S = th.simplex
INNER = Site((1,))
OUTER = outer_site(INNER)


def outer(K):
    # a simplicial set placed in the outer direction, constant in the inner one
    return Extend(K, OUTER, (0,))


def spine_hom_count(X, k, d):
    G = outer(spine(k).source)
    R = Extend(Representable(INNER, d), OUTER, (1,))
    return len(hom_set(Product(G, R), X))


def test_nerve_is_strict_segal():
    A = Representable(INNER, (S(1),))
    N = nerve(UA(A))
    v = is_segal_strict(N, max_k=4)
    assert v.ok and v.witness is None
    assert v.window["max_k"] == 4


def test_free_horn_fails_with_witness():
    X = outer(spine(2).source)
    v = is_segal_strict(X, max_k=3, dims=(1,))
    assert not v.ok
    assert v.witness["k"] == 2 and v.witness["kind"] == "not surjective"


def test_representable_outer_simplex_is_segal():
    X = outer(Representable(DELTA, (S(3),)))
    assert is_segal_strict(X, max_k=4, dims=(1,)).ok


@pytest.mark.parametrize("seed", range(6))
def test_spine_maps_compute_segal_target(seed):
    rng = random.Random(seed)
    X = random_segal_precategory(rng, INNER)
    for k in (2, 3):
        P = SpineProduct(X, k)
        for d in [(S(0),), (S(1),)]:
            assert spine_hom_count(X, k, d) == P.size(d)


def test_segal_map_components():
    N = Nerve(UA(Representable(INNER, (S(1),))))
    phi = segal_map(N, 2)
    assert is_iso_map(phi, Window.bounded(INNER, (2,)))
    with pytest.raises(ValueError):
        segal_map(N, 1)


def test_pi0():
    K = Presented(DELTA, [("a", (S(1),)), ("b", (S(0),))])
    assert len(Pi0(K).classes) == 2
    assert len(Pi0(spine(3).source).classes) == 1
    assert len(Pi0(Discrete(DELTA, range(4))).classes) == 4


def test_homotopy_category_of_ua():
    A = Representable(INNER, (S(1),))
    ho = homotopy_category(nerve(UA(A)))
    assert ho.check_axioms()
    assert len(ho.objects) == 2
    x, y = sorted(ho.objects, key=repr)
    sizes = sorted(len(ho.hom[(a, b)]) for a in ho.objects for b in ho.objects)
    assert sizes == [0, 1, 1, 1]
    assert not ho.isomorphic(x, y)
    assert ho.isomorphic(x, x)


def point_category():
    return OrdinaryCategory(INNER, ("a",), {("a", "a"): ("1a",)}, {("1a", "1a"): "1a"}, {"a": "1a"})


def test_dk_skeleton_inclusion():
    C = point_category()
    D = OrdinaryCategory.groupoid_iso(INNER)
    homs = {("a", "a"): PresheafMap(C.hom("a", "a"), D.hom("a", "a"), lambda d, m: "1a")}
    F = EnrichedFunctor(C, D, {"a": "a"}, homs)
    f = nerve_map(F)
    v = dk_equivalence_check(f, dims=(1,))
    assert v.ok and v.w1 and v.w2


def test_dk_collapsing_hom_fails():
    two = Discrete(INNER, ["p", "q"])
    one = Terminal(INNER)
    C, D = UA(two), UA(one)
    homs = {
        ("x", "y"): PresheafMap(C.hom("x", "y"), D.hom("x", "y"),
                                lambda d, m: (m[0], tuple(() for _ in m[1]))),
        ("x", "x"): PresheafMap(C.hom("x", "x"), D.hom("x", "x"), lambda d, m: m),
        ("y", "y"): PresheafMap(C.hom("y", "y"), D.hom("y", "y"), lambda d, m: m),
        ("y", "x"): PresheafMap(C.hom("y", "x"), D.hom("y", "x"), lambda d, m: m),
    }
    F = EnrichedFunctor(C, D, {"x": "x", "y": "y"}, homs)
    v = dk_equivalence_check(nerve_map(F), dims=(1,))
    assert not v.ok and not v.w1 and not v.w2
    assert v.witness["kind"] == "not injective"


def test_dk_requires_strict_inputs():
    X = outer(spine(2).source)
    f = PresheafMap.identity(X)
    with pytest.raises(ValueError):
        dk_equivalence_check(f, dims=(1,))


@pytest.mark.parametrize("seed", range(12))
def test_reduction_adjunction(seed):
    rng = random.Random(seed)
    X = random_presented(rng, OUTER, 2, 2, name="X")
    Y = random_segal_precategory(rng, INNER)
    r = reduction(X)
    assert is_discrete0(r.diagram)
    through = hom_set(r.diagram, Y)
    direct = hom_set(X, Y)
    assert len(through) == len(direct)
    keys = {g.key() for g in direct}
    assert {r.unit.then(g).key() for g in through} == keys


def test_reduction_collapses_level_zero():
    # outer-constant on an inner edge: level 0 is connected, so it becomes a point
    X = Extend(Representable(INNER, (S(1),)), OUTER, (1,))
    r = reduction(X)
    for k in range(3):
        assert level(r.diagram, 0).size((S(k),)) == 1
        assert level(r.diagram, 2).size((S(k),)) == 1
    # level 0 already discrete: nothing changes
    Y = outer(spine(2).source)
    rY = reduction(Y)
    for m in range(3):
        assert level(rY.diagram, m).size((S(1),)) == level(Y, m).size((S(1),))


@pytest.mark.parametrize("seed", range(6))
def test_reduce_map_naturality(seed):
    rng = random.Random(seed)
    X = random_presented(rng, OUTER, 2, 2, name="X")
    Y = random_presented(rng, OUTER, 2, 2, name="Y")
    maps = hom_set(X, Y)
    if not maps:
        return
    f = rng.choice(maps)
    rx, ry = reduction(X), reduction(Y)
    g = reduce_map(f, rx, ry)
    assert rx.unit.then(g).key() == f.then(ry.unit).key()


@pytest.mark.parametrize("seed", range(6))
def test_phi_factorization(seed):
    rng = random.Random(seed)
    X = random_segal_precategory(rng, INNER)
    Y = random_segal_precategory(rng, INNER)
    maps = hom_set(X, Y)
    if not maps:
        return
    f = rng.choice(maps)
    ph = phi_construction(f)
    assert ph.first.then(ph.second).key() == f.key()
    f0 = level_map(f, 0)
    eta = cosk0_unit(Y)
    x0 = level(X, 0)
    for m in range(3):
        for k in range(2):
            d = (S(m), S(k))
            inner = d[1:]
            # cells of Y together with a lift of their vertex tuple to X_0
            expect = sum(
                1 for y in Y.elements(d)
                for t in itertools.product(x0.elements(inner), repeat=m + 1)
                if tuple(f0.apply(inner, v) for v in t) == eta.apply(d, y))
            assert ph.phi_y.size(d) == expect
    assert is_iso_map(level_map(ph.first, 0), Window.bounded(INNER, (1,)))
