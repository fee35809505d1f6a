"""Outer-simplicial diagrams of presheaves.

A diagram ``X`` is a presheaf on ``Site((1,) + inner.levels)``; factor 0 is
the outer simplicial direction and ``level(X, m)`` is the presheaf ``X_m`` on
the inner site.  This module computes latching and matching objects,
degeneracy partitions, skeleta, ``cosk_0`` and fibers over vertex tuples.
"""

from __future__ import annotations

import itertools
from typing import NamedTuple

from . import theta as th
from .presheaf import (
    Presheaf, PresheafMap, Pushout, Restrict, Sub, boundary, hom_set,
)
from .site import Site, Window

__all__ = [
    "outer_site",
    "inner_site",
    "level",
    "level_map",
    "outer_point",
    "latching",
    "nondegenerate",
    "matching",
    "relative_latching_map",
    "latching_report",
    "outer_root_level",
    "skeleton",
    "Cosk0",
    "cosk0_unit",
    "vertices",
    "vertex_labels",
    "is_discrete0",
    "fiber",
    "SegalPreObject",
]


def outer_site(inner: Site) -> Site:
    return Site((1,) + inner.levels)


def inner_site(X: Presheaf) -> Site:
    return Site(X.site.levels[1:])


def _diagram(X):
    return getattr(X, "diagram", X)


def inner_window(X: Presheaf, dims=None) -> Window:
    site = inner_site(X)
    if dims is None:
        if X.dims is None:
            raise ValueError("diagram has unbounded support; give inner window dims")
        dims = X.dims[1:]
    return Window.bounded(site, dims)


def level(X: Presheaf, m: int) -> Restrict:
    X = _diagram(X)
    cache = X.__dict__.setdefault("_levels", {})
    found = cache.get(m)
    if found is None:
        found = Restrict(X, 0, th.simplex(m))
        cache[m] = found
    return found


def level_map(f: PresheafMap, m: int) -> PresheafMap:
    src, tgt = level(f.source, m), level(f.target, m)
    return PresheafMap(src, tgt, lambda d, x: f.apply(src.lift_object(d), x), name=f"{f.name}_{m}")


def _outer(alpha, d):
    """Site morphism ``alpha x id_d`` on the outer site."""
    return (alpha,) + tuple(th.identity(x) for x in d)


def outer_point(d) -> tuple:
    """The inner site morphism ``* -> d`` through vertex 0 in each factor."""
    return tuple(th.vertex(x, 0) for x in d)


# --- latching -----------------------------------------------------------------------

def _degeneracy(X, m, i, d, x):
    """``s_i x`` for ``x`` in ``X_m(d)``."""
    return X.act(_outer(th.codegeneracy(m, i), d), x)


def _face(X, m, i, d, x):
    """``d_i x`` for ``x`` in ``X_m(d)``."""
    return X.act(_outer(th.coface(m, i), d), x)


class LatchingData(NamedTuple):
    m: int
    sub: Sub
    inclusion: PresheafMap
    witness: object  # witness(d, x) -> index i with x = s_i d_i x, or None


def latching(X, m: int) -> LatchingData:
    """``L_m X``: the elements of ``X_m`` in the image of some ``s_i``."""
    X = _diagram(X)
    Xm = level(X, m)

    def witness(d, x):
        for i in range(m):
            if _degeneracy(X, m - 1, i, d, _face(X, m, i, d, x)) == x:
                return i
        return None

    sub = Sub(Xm, lambda d, x: witness(d, x) is not None, name=f"L_{m}")
    return LatchingData(m, sub, sub.inclusion(), witness)


class Partition(NamedTuple):
    degenerate: tuple
    nondegenerate: tuple
    agree: bool


def nondegenerate(X, m: int, d) -> Partition:
    """Split ``X_m(d)`` by latching membership; cross-check against distinct degeneracies."""
    X = _diagram(X)
    data = latching(X, m)
    degen, nondeg, agree = [], [], True
    for x in level(X, m).elements(d):
        in_image = data.witness(d, x) is not None
        images = [_degeneracy(X, m, i, d, x) for i in range(m + 1)]
        distinct = len(set(images)) == len(images)
        agree = agree and (in_image != distinct)
        (degen if in_image else nondeg).append(x)
    return Partition(tuple(degen), tuple(nondeg), agree)


def matching(X: Presheaf, a) -> list:
    """``M_a X = Hom(dTheta[a], X)``."""
    return hom_set(boundary(X.site, a).source, X)


def relative_latching_map(f: PresheafMap, m: int) -> PresheafMap:
    """``X_m +_{L_m X} L_m Y -> Y_m``."""
    lx, ly = latching(f.source, m), latching(f.target, m)
    fm = level_map(f, m)
    restricted = PresheafMap(lx.sub, ly.sub, lambda d, x: fm.apply(d, x), name="f|L")
    po = Pushout(lx.inclusion, restricted, name=f"X_{m} +_L L_{m}Y")
    return po.induced(fm, ly.inclusion)


def latching_report(f: PresheafMap, max_level=None, dims=None) -> dict:
    """Relative latching monicity per outer level, with a witness on failure."""
    Y = f.target
    if max_level is None:
        if Y.dims is None:
            raise ValueError("unbounded diagram; give max_level")
        max_level = Y.dims[0] + 1
    window = inner_window(Y, dims)
    levels = []
    for m in range(max_level + 1):
        g = relative_latching_map(f, m)
        witness = None
        for d in window:
            seen = {}
            for x in g.source.elements(d):
                y = g.apply(d, x)
                if y in seen:
                    witness = {"object": [th.object_to_json(o) for o in d],
                               "elements": [repr(seen[y]), repr(x)]}
                    break
                seen[y] = x
            if witness:
                break
        levels.append({"m": m, "latching_mono": witness is None, "witness": witness})
    return {"levels": levels, "window": {"inner_dims": list(window.dims)}}


# --- skeleta ----------------------------------------------------------------------

def outer_root_level(X: Presheaf, d, x) -> int:
    """Outer level of the outer-nondegenerate element ``x`` is a degeneracy of."""
    k, inner = d[0].m, d[1:]
    while k > 0:
        for i in range(k):
            y = _face(X, k, i, inner, x)
            if _degeneracy(X, k - 1, i, inner, y) == x:
                x, k = y, k - 1
                break
        else:
            break
    return k


def skeleton(X, p: int) -> Sub:
    X = _diagram(X)
    dims = None if X.dims is None else (min(p, X.dims[0]),) + X.dims[1:]
    return Sub(X, lambda d, x: outer_root_level(X, d, x) <= p, name=f"sk_{p}", dims=dims)


class Cosk0(Presheaf):
    """``cosk_0`` of a level-0 presheaf: ``([p], d) -> X_0(d)^(p+1)``."""

    def __init__(self, x0: Presheaf):
        super().__init__(outer_site(x0.site), None)
        self.x0 = x0
        self.name = f"cosk0({x0.name})"

    def _compute(self, d):
        return itertools.product(self.x0.elements(d[1:]), repeat=d[0].m + 1)

    def _act(self, f, t):
        g = f[1:]
        return tuple(self.x0.act(g, t[v]) for v in f[0].delta)


def vertices(X: Presheaf, d, x) -> tuple:
    """The ``p + 1`` vertices of ``x`` in ``X_0(d[1:])``."""
    p = d[0].m
    ident = tuple(th.identity(o) for o in d[1:])
    return tuple(X.act((th.vertex(d[0], j),) + ident, x) for j in range(p + 1))


def cosk0_unit(X) -> PresheafMap:
    X = _diagram(X)
    c = Cosk0(level(X, 0))
    return PresheafMap(X, c, lambda d, x: vertices(X, d, x), name="eta")


def vertex_labels(X: Presheaf, d, x) -> tuple:
    """Vertices of ``x`` identified with elements of ``X_0(*)`` (needs ``X_0`` discrete)."""
    inner = d[1:]
    pt = outer_point(inner)
    zero = th.identity(th.simplex(0))
    return tuple(X.act((zero,) + pt, v) for v in vertices(X, d, x))


def is_discrete0(X, dims=None) -> bool:
    """``X_0(*) -> X_0(d)`` is bijective for every inner ``d`` in the window."""
    X = _diagram(X)
    x0 = level(X, 0)
    star = x0.site.terminal()
    base = x0.elements(star)
    for d in inner_window(X, dims):
        image = {x0.act(x0.site.to_terminal(d), v) for v in base}
        if len(image) != len(base) or len(image) != x0.size(d):
            return False
    return True


def fiber(X, p: int, vs) -> Sub:
    """``X_p(v_0, ..., v_p)``: the part of ``X_p`` over the given vertex tuple."""
    X = _diagram(X)
    vs = tuple(vs)
    if len(vs) != p + 1:
        raise ValueError(f"need {p + 1} vertices, got {len(vs)}")
    x0 = level(X, 0)
    labels = set(x0.elements(x0.site.terminal()))
    for v in vs:
        if v not in labels:
            raise ValueError(f"{v!r} is not a vertex of the diagram")
    Xp = level(X, p)
    return Sub(Xp, lambda d, x: vertex_labels(X, Xp.lift_object(d), x) == vs,
               name=f"{X.name}_{p}{vs!r}")


class SegalPreObject:
    """An outer-simplicial diagram whose level 0 is discrete."""

    def __init__(self, diagram: Presheaf, dims=None, check=True):
        self.diagram = diagram
        self.inner = inner_site(diagram)
        self.inner_dims = None if dims is None else tuple(dims)
        if check and not is_discrete0(diagram, self.inner_dims):
            raise ValueError("level 0 is not discrete")

    def __repr__(self):
        return f"<SegalPreObject {self.diagram.name}>"

    @property
    def name(self):
        return self.diagram.name

    def objects(self) -> tuple:
        x0 = level(self.diagram, 0)
        return x0.elements(x0.site.terminal())

    def level(self, m: int) -> Restrict:
        return level(self.diagram, m)

    def window(self) -> Window:
        return inner_window(self.diagram, self.inner_dims)

    def fiber(self, p: int, vs) -> Sub:
        return fiber(self.diagram, p, vs)
