import itertools
import random

import pytest

from theta_calc import theta as th
from theta_calc.presheaf import Discrete, Extend, Representable, Terminal, hom_set, is_mono_map
from theta_calc.random_instances import random_presented, random_sub_inclusion
from theta_calc.reedy import (
    Cosk0, SegalPreObject, cosk0_unit, fiber, inner_window, is_discrete0, latching,
    latching_report, level, matching, nondegenerate, outer_site, relative_latching_map, skeleton,
    vertex_labels,
)
from theta_calc.site import DELTA, Site

S = th.simplex
OUTER = outer_site(DELTA)


def rep(m, k):
    return Representable(OUTER, (S(m), S(k)))


def injective(alpha):
    return len(set(alpha.delta)) == len(alpha.delta)


def test_latching_of_representable():
    X = rep(2, 1)
    for m in range(4):
        L = latching(X, m).sub
        for k in range(3):
            d = (S(k),)
            # degenerate exactly when the outer component is not injective
            expect = sum(1 for a in th.hom_enumerate(S(m), S(2)) if not injective(a))
            assert L.size(d) == expect * len(th.hom_enumerate(S(k), S(1)))


def test_dual_degeneracy_criterion_representable():
    X = rep(2, 1)
    for m in range(4):
        for d in inner_window(X):
            assert nondegenerate(X, m, d).agree


def test_matching_counts():
    # Hom(boundary of [2], Delta[1]) is a monotone triple in [1]
    assert len(matching(Representable(DELTA, (S(1),)), (S(2),))) == 4
    assert len(matching(Representable(DELTA, (S(2),)), (S(2),))) == 10


@pytest.mark.parametrize("seed", range(25))
def test_relative_latching_of_monos(seed):
    rng = random.Random(seed)
    inner = rng.choice([Site((1,)), Site((2,)), Site((1, 1))])
    Y = random_presented(rng, outer_site(inner), 4, 3, name="Y")
    f = random_sub_inclusion(rng, Y)
    assert is_mono_map(f)
    report = latching_report(f)
    assert all(lv["latching_mono"] for lv in report["levels"]), report


def test_relative_latching_detects_non_mono():
    # an outer edge collapsed to a point: two elements of the pushout at level 1
    # land on the single degenerate edge of the point
    X = Extend(Representable(DELTA, (S(1),)), OUTER, (0,))
    Y = Terminal(OUTER)
    f = hom_set(X, Y)[0]
    g = relative_latching_map(f, 1)
    d = (S(0),)
    assert g.source.size(d) == 2 and g.target.size(d) == 1
    assert not is_mono_map(g, inner_window(X))


def test_degeneracy_partition_random():
    rng = random.Random(7)
    for _ in range(10):
        X = random_presented(rng, outer_site(Site((2,))), 3, 3, name="X")
        for m in range(X.dims[0] + 2):
            for d in inner_window(X):
                part = nondegenerate(X, m, d)
                assert part.agree
                assert len(part.degenerate) + len(part.nondegenerate) == level(X, m).size(d)


def test_skeleton_counts():
    X = rep(3, 1)
    for p in range(4):
        sk = skeleton(X, p)
        for k in range(4):
            alphas = [a for a in th.hom_enumerate(S(k), S(3)) if len(set(a.delta)) <= p + 1]
            assert sk.size((S(k), S(1))) == len(alphas) * 3


def test_cosk0_unit():
    X = rep(2, 1)
    c = Cosk0(level(X, 0))
    d = (S(1), S(1))
    assert c.size(d) == level(X, 0).size((S(1),)) ** 2
    eta = cosk0_unit(X)
    # a nerve of a poset embeds in its 0-coskeleton in the outer direction
    assert is_mono_map(eta, [(S(m), S(k)) for m in range(3) for k in range(2)])


def test_discrete_level_zero():
    site = Site((1, 1))
    X = Extend(Discrete(Site((1,)), ["a", "b"]), site, (1,))
    assert is_discrete0(X, (2,))
    assert not is_discrete0(rep(1, 1))


def test_fibers_partition_level():
    site = Site((1, 1))
    X = Extend(Representable(DELTA, (S(2),)), site, (0,))
    P = SegalPreObject(X, dims=(2,))
    objs = P.objects()
    assert len(objs) == 3
    for p in range(3):
        for d in P.window():
            total = sum(fiber(X, p, vs).size(d) for vs in itertools.product(objs, repeat=p + 1))
            assert total == level(X, p).size(d)
    # the nerve of [2] has one arrow between comparable vertices
    x0 = level(X, 0)
    v = sorted(objs, key=lambda u: u[0].delta)
    assert fiber(X, 1, (v[0], v[2])).size((S(0),)) == 1
    assert fiber(X, 1, (v[2], v[0])).size((S(0),)) == 0
    assert x0.size((S(0),)) == 3


def test_vertex_labels_of_terminal():
    site = Site((1, 1))
    T = Terminal(site)
    star = (S(2), S(1))
    labels = vertex_labels(T, star, T.elements(star)[0])
    assert len(labels) == 3 and len(set(labels)) == 1


def test_not_discrete_rejected():
    with pytest.raises(ValueError):
        SegalPreObject(rep(1, 1))
