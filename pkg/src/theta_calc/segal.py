"""Segal maps, strictness, homotopy categories, reduction and the Phi construction."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import theta as th
from .presheaf import Discrete, Presheaf, PresheafMap, Pullback, Pushout, elem_key
from .reedy import (
    SegalPreObject, _diagram, cosk0_unit, fiber, inner_window, is_discrete0, level, level_map,
    outer_site,
)

__all__ = [
    "SegalPreObject",
    "SpineProduct",
    "segal_map",
    "is_segal_strict",
    "SegalVerdict",
    "Pi0",
    "pi0_proxy",
    "HoCategory",
    "homotopy_category",
    "ho_functor",
    "dk_equivalence_check",
    "Constant",
    "reduction",
    "reduce_map",
    "phi_construction",
]


def _edge(k: int, i: int):
    """``alpha^i: [1] -> [k]``, ``0 -> i - 1``, ``1 -> i`` (1-based)."""
    return th.delta_map(1, k, (i - 1, i))


def _outer_map(alpha, inner):
    return (alpha,) + tuple(th.identity(x) for x in inner)


class SpineProduct(Presheaf):
    """``X_1 x_{X_0} ... x_{X_0} X_1`` (``k`` factors) on the inner site."""

    def __init__(self, X: Presheaf, k: int):
        x1 = level(X, 1)
        super().__init__(x1.site, None if x1.dims is None else tuple(k * v for v in x1.dims))
        self.X, self.k, self.x1 = X, k, x1
        self.name = f"{X.name}_1^({k})"

    def _ends(self, d, e):
        X = self.X
        s = X.act(_outer_map(th.coface(1, 1), d), e)
        t = X.act(_outer_map(th.coface(1, 0), d), e)
        return s, t

    def _compute(self, d):
        by_source = {}
        for e in self.x1.elements(d):
            by_source.setdefault(self._ends(d, e)[0], []).append(e)
        chains = [(e,) for e in self.x1.elements(d)]
        for _ in range(self.k - 1):
            chains = [c + (e,) for c in chains for e in by_source.get(self._ends(d, c[-1])[1], ())]
        return chains

    def _act(self, f, x):
        return tuple(self.x1.act(f, e) for e in x)


def segal_map(X, k: int) -> PresheafMap:
    """``phi_k: X_k -> X_1 x_{X_0} ... x_{X_0} X_1``."""
    if k < 2:
        raise ValueError("Segal maps need k >= 2")
    X = _diagram(X)
    xk = level(X, k)
    target = SpineProduct(X, k)
    edges = [_edge(k, i) for i in range(1, k + 1)]

    def fn(d, x):
        return tuple(X.act(_outer_map(a, d), x) for a in edges)

    return PresheafMap(xk, target, fn, name=f"phi_{k}")


@dataclass
class SegalVerdict:
    ok: bool
    witness: dict = None
    window: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def _bijection_witness(f: PresheafMap, window):
    for d in window:
        seen = {}
        for x in f.source.elements(d):
            y = f.apply(d, x)
            if y in seen:
                return {"object": [th.object_to_json(o) for o in d], "kind": "not injective",
                        "elements": [repr(seen[y]), repr(x)]}
            seen[y] = x
        for y in f.target.elements(d):
            if y not in seen:
                return {"object": [th.object_to_json(o) for o in d], "kind": "not surjective",
                        "element": repr(y)}
    return None


def is_segal_strict(X, max_k=None, dims=None) -> SegalVerdict:
    """Are ``phi_2 .. phi_max_k`` levelwise bijections on the inner window?"""
    D = _diagram(X)
    dims = dims if dims is not None else getattr(X, "inner_dims", None)
    if not is_discrete0(D, dims):
        raise ValueError("level 0 is not discrete")
    if max_k is None:
        max_k = 3 if D.dims is None else max(3, D.dims[0] + 1)
    window = inner_window(D, dims)
    info = {"inner_dims": list(window.dims), "max_k": max_k}
    for k in range(2, max_k + 1):
        w = _bijection_witness(segal_map(D, k), window)
        if w is not None:
            w["k"] = k
            return SegalVerdict(False, w, info)
    return SegalVerdict(True, None, info)


# --- components -----------------------------------------------------------------------

class Pi0:
    """Components of a presheaf, from its points glued along 1-cells."""

    def __init__(self, P: Presheaf):
        site = P.site
        star = site.terminal()
        points = P.elements(star)
        parent = {x: x for x in points}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, n in enumerate(site.levels):
            if n == 0:
                continue
            arrow = th.ThetaObject(n, (th.terminal(n - 1),))
            d = site.replace(star, i, arrow)
            ident = site.identity(star)
            srcs = site.replace(ident, i, th.vertex(arrow, 0))
            tgts = site.replace(ident, i, th.vertex(arrow, 1))
            for e in P.elements(d):
                a, b = find(P.act(srcs, e)), find(P.act(tgts, e))
                if a != b:
                    if elem_key(a) < elem_key(b):
                        parent[b] = a
                    else:
                        parent[a] = b
        self.presheaf = P
        self.of_point = {x: find(x) for x in points}
        self.classes = tuple(sorted(set(self.of_point.values()), key=elem_key))

    def __len__(self):
        return len(self.classes)

    def component(self, d, x):
        """The class of an element at any object ``d``."""
        return self.of_point[self.presheaf.act(tuple(th.vertex(o, 0) for o in d), x)]

    def members(self, c) -> tuple:
        return tuple(x for x in self.presheaf.elements(self.presheaf.site.terminal())
                     if self.of_point[x] == c)


def pi0_proxy(P: Presheaf) -> Pi0:
    return Pi0(P)


# --- homotopy categories ----------------------------------------------------------------

@dataclass
class HoCategory:
    objects: tuple
    hom: dict          # (x, y) -> tuple of morphism labels
    comp: dict         # (g, f) -> g o f, for f: x -> y, g: y -> z
    ident: dict        # x -> identity label
    source: dict = field(default_factory=dict)
    target: dict = field(default_factory=dict)

    def __post_init__(self):
        for (x, y), ms in self.hom.items():
            for m in ms:
                self.source[m] = x
                self.target[m] = y

    def compose(self, g, f):
        return self.comp[(g, f)]

    def check_axioms(self) -> bool:
        for (x, y), ms in self.hom.items():
            for f in ms:
                if self.comp[(self.ident[y], f)] != f or self.comp[(f, self.ident[x])] != f:
                    return False
        for x, y, z, w in itertools.product(self.objects, repeat=4):
            for f in self.hom[(x, y)]:
                for g in self.hom[(y, z)]:
                    for h in self.hom[(z, w)]:
                        if self.comp[(h, self.comp[(g, f)])] != self.comp[(self.comp[(h, g)], f)]:
                            return False
        return True

    def is_iso(self, f) -> bool:
        x, y = self.source[f], self.target[f]
        return any(self.comp[(g, f)] == self.ident[x] and self.comp[(f, g)] == self.ident[y]
                   for g in self.hom[(y, x)])

    def isomorphic(self, x, y) -> bool:
        return any(self.is_iso(f) for f in self.hom[(x, y)])

    def to_json(self) -> dict:
        def lab(m):
            return repr(m)
        return {
            "objects": [repr(x) for x in self.objects],
            "hom": {f"{x!r}|{y!r}": [lab(m) for m in ms] for (x, y), ms in self.hom.items()},
            "identity": {repr(x): lab(m) for x, m in self.ident.items()},
            "composition": [[lab(g), lab(f), lab(h)] for (g, f), h in self.comp.items()],
        }


class DescentError(ValueError):
    """Composition does not respect the component relation."""


def _star_chain(X, k):
    """``phi_k`` at the terminal inner object, inverted."""
    star = level(X, 0).site.terminal()
    phi = segal_map(X, k)
    inverse = {}
    for x in phi.source.elements(star):
        inverse[phi.apply(star, x)] = x
    return star, inverse


def homotopy_category(X, dims=None) -> HoCategory:
    """Objects ``X_0``; morphisms are components of the hom fibers of ``X_1``."""
    verdict = is_segal_strict(X, dims=dims)
    if not verdict:
        raise ValueError(f"not a strict Segal object: {verdict.witness}")
    D = _diagram(X)
    x0 = level(D, 0)
    star = x0.site.terminal()
    objs = x0.elements(star)
    pis, hom, label_of = {}, {}, {}
    for x in objs:
        for y in objs:
            pi = Pi0(fiber(D, 1, (x, y)))
            pis[(x, y)] = pi
            hom[(x, y)] = tuple(((x, y), c) for c in pi.classes)
            for e, c in pi.of_point.items():
                label_of[e] = ((x, y), c)
    _, inverse = _star_chain(D, 2)
    d1 = _outer_map(th.coface(2, 1), star)
    comp = {}
    for x, y, z in itertools.product(objs, repeat=3):
        for f in hom[(x, y)]:
            for g in hom[(y, z)]:
                results = set()
                for fe in pis[(x, y)].members(f[1]):
                    for ge in pis[(y, z)].members(g[1]):
                        results.add(label_of[D.act(d1, inverse[(fe, ge)])])
                if len(results) != 1:
                    raise DescentError(f"composition of {g!r} and {f!r} is not well defined")
                comp[(g, f)] = results.pop()
    ident = {}
    s0 = _outer_map(th.codegeneracy(0, 0), star)
    for x in objs:
        ident[x] = label_of[D.act(s0, x)]
    return HoCategory(objs, hom, comp, ident)


def ho_functor(f: PresheafMap, hx: HoCategory, hy: HoCategory):
    """Object and morphism maps of the functor induced by a map of strict objects."""
    X, Y = f.source, f.target
    star = level(X, 0).site.terminal()
    d0 = (th.simplex(0),) + star
    d1 = (th.simplex(1),) + star
    obj = {x: f.apply(d0, x) for x in hx.objects}
    label_y = {}
    for (a, b), ms in hy.hom.items():
        pi = Pi0(fiber(Y, 1, (a, b)))
        for e, c in pi.of_point.items():
            label_y[e] = ((a, b), c)
    mor = {}
    for (a, b), ms in hx.hom.items():
        pi = Pi0(fiber(X, 1, (a, b)))
        for m in ms:
            images = {label_y[f.apply(d1, e)] for e in pi.members(m[1])}
            if len(images) != 1:
                raise DescentError("map does not respect components")
            mor[m] = images.pop()
    return obj, mor


def _functor_ok(obj, mor, hx: HoCategory, hy: HoCategory) -> bool:
    for x in hx.objects:
        if mor[hx.ident[x]] != hy.ident[obj[x]]:
            return False
    for (g, f), h in hx.comp.items():
        if hy.comp[(mor[g], mor[f])] != mor[h]:
            return False
    return True


@dataclass
class DKVerdict:
    ok: bool
    w1: bool
    w2: bool
    witness: dict = None

    def __bool__(self):
        return self.ok


def dk_equivalence_check(f: PresheafMap, dims=None) -> DKVerdict:
    """Fibers of ``X_1`` map bijectively, and ``Ho`` is an equivalence."""
    X, Y = f.source, f.target
    for Z in (X, Y):
        if not is_segal_strict(Z, dims=dims):
            raise ValueError("dk_equivalence_check needs strict Segal objects")
    window = inner_window(Y, dims)
    hx, hy = homotopy_category(X, dims), homotopy_category(Y, dims)
    obj, mor = ho_functor(f, hx, hy)
    w1, witness = True, None
    for x in hx.objects:
        for y in hx.objects:
            fx, fy = fiber(X, 1, (x, y)), fiber(Y, 1, (obj[x], obj[y]))
            f1 = level_map(f, 1)
            g = PresheafMap(fx, fy, f1.apply, name="f_1")
            w = _bijection_witness(g, window)
            if w is not None:
                w1, witness = False, dict(w, pair=[repr(x), repr(y)])
                break
        if not w1:
            break
    full = all(
        len({mor[m] for m in hx.hom[(x, y)]}) == len(hx.hom[(x, y)])
        and {mor[m] for m in hx.hom[(x, y)]} == set(hy.hom[(obj[x], obj[y])])
        for x in hx.objects for y in hx.objects
    )
    ess = all(any(hy.isomorphic(obj[x], b) for x in hx.objects) for b in hy.objects)
    w2 = full and ess and _functor_ok(obj, mor, hx, hy)
    if witness is None and not w2:
        witness = {"kind": "not fully faithful" if not full else "not essentially surjective"}
    return DKVerdict(w1 and w2, w1, w2, witness)


# --- reduction -------------------------------------------------------------------------

class Constant(Presheaf):
    """The outer-constant diagram on an inner presheaf."""

    def __init__(self, inner: Presheaf):
        super().__init__(outer_site(inner.site),
                         None if inner.dims is None else (0,) + inner.dims)
        self.inner = inner
        self.name = f"c({inner.name})"

    def _compute(self, d):
        return self.inner.elements(d[1:])

    def _act(self, f, x):
        return self.inner.act(f[1:], x)


@dataclass
class Reduction:
    diagram: Pushout
    unit: PresheafMap
    components: Pi0
    constant: PresheafMap     # c(X_0) -> X
    collapse: PresheafMap     # c(X_0) -> c(pi_0 X_0)


def reduction(X) -> Reduction:
    """``(X)_r``: collapse ``X_0`` to its components, pushed out along the degeneracies."""
    X = _diagram(X)
    x0 = level(X, 0)
    pi = Pi0(x0)
    cx = Constant(x0)
    cpi = Constant(Discrete(x0.site, pi.classes, name="pi0"))

    def total_degeneracy(d, x):
        return X.act((th.terminal_map(d[0]),) + tuple(th.identity(o) for o in d[1:]), x)

    inc = PresheafMap(cx, X, total_degeneracy, name="c")
    col = PresheafMap(cx, cpi, lambda d, x: pi.component(d[1:], x), name="q")
    po = Pushout(inc, col, name=f"({X.name})_r")
    return Reduction(po, po.inl(), pi, inc, col)


def reduce_map(f: PresheafMap, rx: Reduction = None, ry: Reduction = None) -> PresheafMap:
    """The induced map ``(X)_r -> (Y)_r``."""
    rx = rx or reduction(f.source)
    ry = ry or reduction(f.target)
    f0 = level_map(f, 0)
    star = f0.source.site.terminal()
    image = {c: ry.components.of_point[f0.apply(star, rx.components.members(c)[0])]
             for c in rx.components.classes}
    inr = ry.diagram.inr()
    right = PresheafMap(rx.collapse.target, ry.diagram, lambda d, c: inr.apply(d, image[c]),
                        name="pi0(f)")
    return rx.diagram.induced(f.then(ry.unit), right)


# --- the Phi construction ------------------------------------------------------------------

@dataclass
class PhiFactorization:
    phi_y: Pullback
    first: PresheafMap     # X -> Phi Y
    second: PresheafMap    # Phi Y -> Y


def phi_construction(f: PresheafMap) -> PhiFactorization:
    """``Phi Y = Y x_{cosk_0 Y_0} cosk_0 X_0`` with the factorization of ``f``."""
    X, Y = f.source, f.target
    eta_y = cosk0_unit(Y)
    eta_x = cosk0_unit(X)
    f0 = level_map(f, 0)
    cx, cy = eta_x.target, eta_y.target
    c_f = PresheafMap(cx, cy, lambda d, t: tuple(f0.apply(d[1:], v) for v in t), name="cosk0(f)")
    pb = Pullback(eta_y, c_f)
    first = PresheafMap(X, pb, lambda d, x: (f.apply(d, x), eta_x.apply(d, x)), name="X->PhiY")
    return PhiFactorization(pb, first, pb.projection(0))
