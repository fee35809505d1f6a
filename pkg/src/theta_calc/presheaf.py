"""Finitely generated set-valued presheaves on product Theta-sites.

Every presheaf is a lazy functor: ``elements(d)`` returns the canonical,
sorted tuple of elements at a site object and ``act(f, x)`` restricts an
element along a site morphism ``f: d' -> d``.  Nothing is tabulated unless
asked for; tabulation is a cache over a window.

``dims`` bounds, per factor, the degrees at which nondegenerate elements can
occur.  Because every Theta_n and every product of them is an elegant Reedy
category, each element is uniquely a degeneracy of a nondegenerate one, so a
presheaf with finite ``dims`` is generated by the nondegenerate elements in
that range.  Hom-sets out of such a presheaf are computed by assigning values
to those generators subject to the elementary face relations.
"""

from __future__ import annotations

import itertools
import json
from functools import lru_cache

from . import theta as th
from .site import Site, Window, WindowError

__all__ = [
    "elem_key",
    "Presheaf",
    "Representable",
    "Presented",
    "Empty",
    "Terminal",
    "Discrete",
    "Extend",
    "Restrict",
    "Product",
    "Coproduct",
    "Sub",
    "SubGenerated",
    "Pullback",
    "Pushout",
    "Tabulated",
    "PresheafMap",
    "representable",
    "boundary",
    "segal_core",
    "product",
    "coproduct",
    "pullback",
    "pushout",
    "hom_set",
    "is_mono_map",
    "is_epi_map",
    "is_iso_map",
    "tabulate",
    "presentation_from_json",
    "presentation_to_json",
]


@lru_cache(maxsize=None)
def elem_key(x):
    """Total order on element values (mixed ints, strings, tuples, morphisms)."""
    if isinstance(x, tuple):
        return (3, tuple(elem_key(y) for y in x))
    if isinstance(x, bool):
        return (0, int(x))
    if isinstance(x, int):
        return (0, x)
    if isinstance(x, str):
        return (1, x)
    if isinstance(x, (th.ThetaObject, th.ThetaMorphism)):
        return (2, x.key)
    if x is None:
        return (4,)
    raise TypeError(f"unsupported element value {x!r}")


def _sorted(xs):
    return tuple(sorted(set(xs), key=elem_key))


def _max_dims(site, dim_list):
    dim_list = [d for d in dim_list]
    if any(d is None for d in dim_list):
        return None
    if not dim_list:
        return (0,) * len(site)
    return tuple(max(ds) for ds in zip(*dim_list))


def _sum_dims(site, dim_list):
    if any(d is None for d in dim_list):
        return None
    if not dim_list:
        return (0,) * len(site)
    return tuple(sum(ds) for ds in zip(*dim_list))


class Presheaf:
    """Base class.  Subclasses implement ``_compute`` and ``_act``."""

    name = "presheaf"

    def __init__(self, site: Site, dims):
        self.site = site
        self.dims = None if dims is None else tuple(dims)
        self._elements = {}
        self._sets = {}
        self._acts = {}
        self._ez = {}
        self._gens = None
        self._face_index = {}

    def __repr__(self):
        return f"<{type(self).__name__} {self.name} on {self.site!r}>"

    # evaluation -------------------------------------------------------------

    def _compute(self, d):
        raise NotImplementedError

    def _act(self, f, x):
        raise NotImplementedError

    def elements(self, d) -> tuple:
        found = self._elements.get(d)
        if found is None:
            found = _sorted(self._compute(d))
            self._elements[d] = found
            self._sets[d] = frozenset(found)
        return found

    def contains(self, d, x) -> bool:
        if d not in self._sets:
            self.elements(d)
        return x in self._sets[d]

    def size(self, d) -> int:
        return len(self.elements(d))

    def act(self, f, x):
        """Restrict ``x`` along ``f: d' -> d``."""
        k = (f, x)
        found = self._acts.get(k, _MISSING)
        if found is _MISSING:
            found = self._act(f, x)
            self._acts[k] = found
        return found

    # degeneracy structure ---------------------------------------------------

    def window(self, dims=None) -> Window:
        dims = self.dims if dims is None else dims
        if dims is None:
            raise ValueError(f"{self!r} has unbounded support; give explicit window dims")
        return Window.bounded(self.site, dims)

    def is_degenerate(self, d, x) -> bool:
        return any(self.act(sig, self.act(s, x)) == x for sig, s in self.site.codegeneracies(d))

    def decompose(self, d, x):
        """Return ``(sigma, e, z)`` with ``z`` nondegenerate and ``x = sigma^* z``."""
        k = (d, x)
        found = self._ez.get(k)
        if found is not None:
            return found
        site = self.site
        total = site.identity(d)
        cur_d, cur = d, x
        progress = True
        while progress:
            progress = False
            for sig, s in site.codegeneracies(cur_d):
                z = self.act(s, cur)
                if self.act(sig, z) == cur:
                    total = site.compose(sig, total)
                    cur_d, cur = site.target(sig), z
                    progress = True
                    break
        found = (total, cur_d, cur)
        self._ez[k] = found
        return found

    def generators(self) -> tuple:
        """Nondegenerate elements ``(d, x)``, ordered by degree."""
        if self._gens is None:
            if self.dims is None:
                raise ValueError(f"{self!r} has unbounded support; truncate it first")
            out = []
            for d in self.site.objects(self.dims):
                for x in self.elements(d):
                    if not self.is_degenerate(d, x):
                        out.append((d, x))
            out.sort(key=lambda g: (self.site.degree(g[0]), tuple(o.key for o in g[0]), elem_key(g[1])))
            self._gens = tuple(out)
        return self._gens

    def face_index(self, d, u):
        """Group ``elements(d)`` by their restriction along ``u``."""
        k = (d, u)
        found = self._face_index.get(k)
        if found is None:
            found = {}
            for w in self.elements(d):
                found.setdefault(self.act(u, w), []).append(w)
            self._face_index[k] = found
        return found


_MISSING = object()


class Representable(Presheaf):
    def __init__(self, site: Site, a):
        a = tuple(a)
        site.check_object(a)
        super().__init__(site, site.degrees(a))
        self.shape = a
        self.name = f"Theta[{a!r}]"

    def _compute(self, d):
        return self.site.hom(d, self.shape)

    def _act(self, f, u):
        return self.site.compose(u, f)

    def elements(self, d):
        found = self._elements.get(d)
        if found is None:
            found = self.site.hom(d, self.shape)
            self._elements[d] = found
            self._sets[d] = frozenset(found)
        return found


class Presented(Presheaf):
    """Coequalizer of a coproduct of representables.

    ``cells`` is a sequence of ``(cell_id, shape)``; each glue relation is a
    pair of element references ``(cell_id, u)`` with ``u`` a site morphism
    into the cell's shape, both references sharing the same source object.
    """

    def __init__(self, site: Site, cells, glue=(), name="presented"):
        cells = tuple((cid, tuple(shape)) for cid, shape in cells)
        ids = [cid for cid, _ in cells]
        if len(set(ids)) != len(ids):
            raise ValueError("cell ids must be unique")
        for _, shape in cells:
            site.check_object(shape)
        shapes = dict(cells)
        rels = []
        for (c1, u1), (c2, u2) in glue:
            u1, u2 = tuple(u1), tuple(u2)
            if site.target(u1) != shapes[c1] or site.target(u2) != shapes[c2]:
                raise ValueError("glue reference does not land in its cell's shape")
            if site.source(u1) != site.source(u2):
                raise ValueError("glued elements must live at the same object")
            rels.append(((c1, u1), (c2, u2)))
        dims = _max_dims(site, [site.degrees(s) for _, s in cells])
        super().__init__(site, dims)
        self.cells = cells
        self.shapes = shapes
        self.glue = tuple(rels)
        self.name = name
        self._classes = {}

    def classes(self, d) -> dict:
        found = self._classes.get(d)
        if found is not None:
            return found
        site = self.site
        parent = {}
        for cid, shape in self.cells:
            for u in site.hom(d, shape):
                parent[(cid, u)] = (cid, u)

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for (c1, u1), (c2, u2) in self.glue:
            e = site.source(u1)
            for h in site.hom(d, e):
                a, b = find((c1, site.compose(u1, h))), find((c2, site.compose(u2, h)))
                if a != b:
                    if elem_key(a) < elem_key(b):
                        parent[b] = a
                    else:
                        parent[a] = b
        found = {x: find(x) for x in parent}
        self._classes[d] = found
        return found

    def _compute(self, d):
        return set(self.classes(d).values())

    def _act(self, f, x):
        cid, u = x
        return self.classes(self.site.source(f))[(cid, self.site.compose(u, f))]

    def canonical(self, d, ref):
        return self.classes(d)[ref]

    def cell_element(self, cid):
        """The tautological element of cell ``cid`` at its own shape."""
        shape = self.shapes[cid]
        return self.canonical(shape, (cid, self.site.identity(shape)))


class Empty(Presheaf):
    name = "empty"

    def __init__(self, site: Site):
        super().__init__(site, (0,) * len(site))

    def _compute(self, d):
        return ()

    def _act(self, f, x):
        raise KeyError(x)


class Terminal(Presheaf):
    name = "terminal"
    POINT = ()

    def __init__(self, site: Site):
        super().__init__(site, (0,) * len(site))

    def _compute(self, d):
        return (self.POINT,)

    def _act(self, f, x):
        return x


class Discrete(Presheaf):
    """The constant presheaf on a finite set of labels."""

    def __init__(self, site: Site, labels, name="discrete"):
        super().__init__(site, (0,) * len(site))
        self.labels = _sorted(labels)
        self.name = name

    def _compute(self, d):
        return self.labels

    def _act(self, f, x):
        return x


class Extend(Presheaf):
    """Pull a presheaf on a sub-product back to ``site`` (constant in the other factors)."""

    def __init__(self, inner: Presheaf, site: Site, axes):
        axes = tuple(axes)
        if tuple(site.levels[i] for i in axes) != inner.site.levels:
            raise ValueError("axes do not match the inner site")
        dims = None
        if inner.dims is not None:
            dims = [0] * len(site)
            for i, k in zip(axes, inner.dims):
                dims[i] = k
        super().__init__(site, dims)
        self.inner = inner
        self.axes = axes
        self.name = f"ext({inner.name})"

    def _compute(self, d):
        return self.inner.elements(tuple(d[i] for i in self.axes))

    def _act(self, f, x):
        return self.inner.act(tuple(f[i] for i in self.axes), x)


class Restrict(Presheaf):
    """Fix factor ``axis`` at object ``a``; the result lives on the remaining factors.

    For an outer-simplicial diagram ``X`` this is the level ``X_m`` when
    ``axis == 0`` and ``a == [m]``.
    """

    def __init__(self, outer: Presheaf, axis: int, a):
        levels = outer.site.levels
        site = Site(levels[:axis] + levels[axis + 1:])
        dims = None if outer.dims is None else outer.dims[:axis] + outer.dims[axis + 1:]
        super().__init__(site, dims)
        self.outer = outer
        self.axis = axis
        self.at = a
        self.ident = th.identity(a)
        self.name = f"{outer.name}|{a!r}"

    def lift_object(self, d):
        return d[:self.axis] + (self.at,) + d[self.axis:]

    def lift_morphism(self, f):
        return f[:self.axis] + (self.ident,) + f[self.axis:]

    def _compute(self, d):
        return self.outer.elements(self.lift_object(d))

    def _act(self, f, x):
        return self.outer.act(self.lift_morphism(f), x)


class Product(Presheaf):
    def __init__(self, *factors: Presheaf):
        if not factors:
            raise ValueError("use Terminal for the empty product")
        site = factors[0].site
        _same_site(factors)
        super().__init__(site, _sum_dims(site, [p.dims for p in factors]))
        self.factors = factors
        self.name = " x ".join(p.name for p in factors)

    def _compute(self, d):
        return itertools.product(*(p.elements(d) for p in self.factors))

    def _act(self, f, x):
        return tuple(p.act(f, xi) for p, xi in zip(self.factors, x))

    def projection(self, i: int) -> "PresheafMap":
        return PresheafMap(self, self.factors[i], lambda d, x: x[i], name=f"pr{i}")


class Coproduct(Presheaf):
    def __init__(self, *parts: Presheaf, site: Site = None):
        if not parts and site is None:
            raise ValueError("an empty coproduct needs an explicit site")
        site = parts[0].site if parts else site
        _same_site(parts)
        super().__init__(site, _max_dims(site, [p.dims for p in parts]))
        self.parts = parts
        self.name = " + ".join(p.name for p in parts) or "empty"

    def _compute(self, d):
        return [(i, x) for i, p in enumerate(self.parts) for x in p.elements(d)]

    def _act(self, f, x):
        i, y = x
        return (i, self.parts[i].act(f, y))

    def injection(self, i: int) -> "PresheafMap":
        return PresheafMap(self.parts[i], self, lambda d, x: (i, x), name=f"in{i}")


class Sub(Presheaf):
    """Subpresheaf cut out by a predicate ``pred(d, x)`` closed under restriction."""

    def __init__(self, parent: Presheaf, pred, name="sub", dims=None):
        super().__init__(parent.site, parent.dims if dims is None else dims)
        self.parent = parent
        self.pred = pred
        self.name = name

    def _compute(self, d):
        return [x for x in self.parent.elements(d) if self.pred(d, x)]

    def _act(self, f, x):
        return self.parent.act(f, x)

    def inclusion(self) -> "PresheafMap":
        return PresheafMap(self, self.parent, lambda d, x: x, name="incl")


class SubGenerated(Sub):
    """The smallest subpresheaf containing the given elements ``(e, g)``."""

    def __init__(self, parent: Presheaf, gens, name="generated"):
        gens = tuple((tuple(e), g) for e, g in gens)
        for e, g in gens:
            if not parent.contains(e, g):
                raise ValueError(f"{g!r} is not an element at {e!r}")
        site = parent.site
        dims = _max_dims(site, [site.degrees(e) for e, _ in gens])
        self._members = {}
        super().__init__(parent, self._member, name=name, dims=dims)
        self.seeds = gens

    def _member(self, d, x):
        found = self._members.get(d)
        if found is None:
            site = self.parent.site
            found = frozenset(
                self.parent.act(h, g) for e, g in self.seeds for h in site.hom(d, e)
            )
            self._members[d] = found
        return x in found


class Pullback(Presheaf):
    """``P x_R Q`` for ``f: P -> R`` and ``g: Q -> R``."""

    def __init__(self, f: "PresheafMap", g: "PresheafMap"):
        if f.target is not g.target:
            raise ValueError("pullback needs a common target")
        site = f.source.site
        _same_site([f.source, g.source, f.target])
        super().__init__(site, _sum_dims(site, [f.source.dims, g.source.dims]))
        self.f, self.g = f, g
        self.name = f"({f.source.name} x_R {g.source.name})"

    def _compute(self, d):
        by_value = {}
        for y in self.g.source.elements(d):
            by_value.setdefault(self.g.apply(d, y), []).append(y)
        return [(x, y) for x in self.f.source.elements(d) for y in by_value.get(self.f.apply(d, x), ())]

    def _act(self, f, x):
        return (self.f.source.act(f, x[0]), self.g.source.act(f, x[1]))

    def projection(self, i: int) -> "PresheafMap":
        src = (self.f.source, self.g.source)[i]
        return PresheafMap(self, src, lambda d, x: x[i], name=f"pr{i}")


class Pushout(Presheaf):
    """``B +_A C`` for ``i: A -> B`` and ``j: A -> C``; elements ``(0, b)`` or ``(1, c)``."""

    def __init__(self, i: "PresheafMap", j: "PresheafMap", name=None):
        if i.source is not j.source:
            raise ValueError("pushout needs a common source")
        site = i.source.site
        _same_site([i.source, i.target, j.target])
        super().__init__(site, _max_dims(site, [i.target.dims, j.target.dims]))
        self.i, self.j = i, j
        self.left, self.right = i.target, j.target
        self.name = name or f"({i.target.name} +_A {j.target.name})"
        self._classes = {}

    def classes(self, d) -> dict:
        found = self._classes.get(d)
        if found is not None:
            return found
        parent = {}
        for b in self.left.elements(d):
            parent[(0, b)] = (0, b)
        for c in self.right.elements(d):
            parent[(1, c)] = (1, c)

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a in self.i.source.elements(d):
            p, q = find((0, self.i.apply(d, a))), find((1, self.j.apply(d, a)))
            if p != q:
                if elem_key(p) < elem_key(q):
                    parent[q] = p
                else:
                    parent[p] = q
        found = {x: find(x) for x in parent}
        self._classes[d] = found
        return found

    def _compute(self, d):
        return set(self.classes(d).values())

    def _act(self, f, x):
        side, y = x
        part = self.left if side == 0 else self.right
        return self.classes(self.site.source(f))[(side, part.act(f, y))]

    def inl(self) -> "PresheafMap":
        return PresheafMap(self.left, self, lambda d, x: self.classes(d)[(0, x)], name="inl")

    def inr(self) -> "PresheafMap":
        return PresheafMap(self.right, self, lambda d, x: self.classes(d)[(1, x)], name="inr")

    def induced(self, b_map: "PresheafMap", c_map: "PresheafMap") -> "PresheafMap":
        """The map out of the pushout determined by maps on both legs."""
        def fn(d, x):
            side, y = x
            return (b_map if side == 0 else c_map).apply(d, y)
        return PresheafMap(self, b_map.target, fn, name="induced")


class Tabulated(Presheaf):
    """A presheaf given by explicit value and action tables over a window."""

    def __init__(self, site: Site, window, values: dict, action: dict, name="tabulated"):
        self.window_objects = tuple(tuple(d) for d in window)
        dims = _max_dims(site, [site.degrees(d) for d in self.window_objects])
        super().__init__(site, dims)
        self.values = {tuple(d): _sorted(v) for d, v in values.items()}
        self.action = action
        self.name = name

    def _compute(self, d):
        if d not in self.values:
            raise WindowError(f"object {d!r} is outside the tabulated window")
        return self.values[d]

    def _act(self, f, x):
        table = self.action.get(f)
        if table is None:
            raise WindowError(f"morphism {f!r} is outside the tabulated window")
        return table[x]


def _same_site(ps):
    sites = {p.site for p in ps}
    if len(sites) > 1:
        raise ValueError(f"site mismatch: {sorted(map(repr, sites))}")


# --- maps ----------------------------------------------------------------------

class PresheafMap:
    """A natural transformation, given by a component function or by values on generators."""

    def __init__(self, source: Presheaf, target: Presheaf, fn=None, assignment=None, name="map"):
        if source.site != target.site:
            raise ValueError(f"site mismatch: {source.site!r} vs {target.site!r}")
        if fn is None and assignment is None:
            raise ValueError("need a component function or a generator assignment")
        self.source, self.target = source, target
        self._fn = fn
        self.assignment = None if assignment is None else tuple(assignment)
        self.name = name
        self._cache = {}
        self._key = None

    def __repr__(self):
        return f"<PresheafMap {self.name}: {self.source.name} -> {self.target.name}>"

    def apply(self, d, x):
        k = (d, x)
        found = self._cache.get(k, _MISSING)
        if found is _MISSING:
            if self._fn is not None:
                found = self._fn(d, x)
            else:
                sigma, e, z = self.source.decompose(d, x)
                idx = _generator_index(self.source)[(e, z)]
                found = self.target.act(sigma, self.assignment[idx])
            self._cache[k] = found
        return found

    def key(self) -> tuple:
        """Values on the source's generators; equal keys mean equal maps."""
        if self._key is None:
            if self.assignment is not None:
                self._key = self.assignment
            else:
                self._key = tuple(self.apply(d, x) for d, x in self.source.generators())
        return self._key

    def components(self, d) -> dict:
        return {x: self.apply(d, x) for x in self.source.elements(d)}

    def then(self, g: "PresheafMap") -> "PresheafMap":
        """``g o self``."""
        if g.source is not self.target:
            raise ValueError("maps are not composable")
        return PresheafMap(self.source, g.target, lambda d, x: g.apply(d, self.apply(d, x)),
                           name=f"{g.name}.{self.name}")

    @classmethod
    def identity(cls, p: Presheaf) -> "PresheafMap":
        return cls(p, p, lambda d, x: x, name="id")

    @classmethod
    def from_cells(cls, source: Presented, target: Presheaf, assign: dict, name="cells") -> "PresheafMap":
        """Map out of a presentation, sending cell ``cid`` to ``assign[cid]``.

        Raises ``ValueError`` when a glue relation is not respected.
        """
        for cid, shape in source.cells:
            if not target.contains(shape, assign[cid]):
                raise ValueError(f"cell {cid!r} is not sent to an element of the target")
        for (c1, u1), (c2, u2) in source.glue:
            if target.act(u1, assign[c1]) != target.act(u2, assign[c2]):
                raise ValueError("cell assignment does not respect the glue relations")
        return cls(source, target, lambda d, x: target.act(x[1], assign[x[0]]), name=name)

    def check_natural(self, window) -> bool:
        site = self.source.site
        objs = list(window)
        for d in objs:
            for e in objs:
                for h in site.hom(d, e):
                    for x in self.source.elements(e):
                        if self.target.act(h, self.apply(e, x)) != self.apply(d, self.source.act(h, x)):
                            return False
        return True


def _generator_index(p: Presheaf) -> dict:
    idx = getattr(p, "_gen_index", None)
    if idx is None:
        idx = {g: k for k, g in enumerate(p.generators())}
        p._gen_index = idx
    return idx


# --- constructions --------------------------------------------------------------

def representable(site: Site, a) -> Representable:
    return Representable(site, a)


def boundary(site: Site, a) -> PresheafMap:
    """``dTheta[a] -> Theta[a]``: elements whose mono part is not invertible."""
    a = tuple(a)
    rep = Representable(site, a)

    def pred(d, u):
        return any(th.factor_epi_mono(ui)[1] is not th.identity(ai) for ui, ai in zip(u, a))

    sub = Sub(rep, pred, name=f"d{rep.name}")
    return sub.inclusion()


def segal_core(m: int, cs) -> PresheafMap:
    """The spine inclusion ``G[m](c_1..c_m) -> Theta[m](c_1..c_m)``."""
    cs = tuple(cs)
    if m < 2:
        raise ValueError("Segal cores need m >= 2")
    if len(cs) != m:
        raise ValueError("need exactly m inner objects")
    level = cs[0].level + 1
    site = Site((level,))
    edges = [th.ThetaObject(level, (c,)) for c in cs]
    cells = [(f"e{i}", (e,)) for i, e in enumerate(edges, 1)]
    glue = []
    for i in range(1, m):
        glue.append(((f"e{i}", (th.vertex(edges[i - 1], 1),)), (f"e{i + 1}", (th.vertex(edges[i], 0),))))
    core = Presented(site, cells, glue, name=f"G[{m}]")
    big = th.ThetaObject(level, cs)
    rep = Representable(site, (big,))
    assign = {}
    for i, (e, c) in enumerate(zip(edges, cs), 1):
        assign[f"e{i}"] = (th.ThetaMorphism(e, big, (i - 1, i), [(th.identity(c),)]),)
    return PresheafMap.from_cells(core, rep, assign, name="se")


def product(*ps: Presheaf) -> Presheaf:
    return Product(*ps)


def coproduct(*ps: Presheaf, site: Site = None) -> Coproduct:
    return Coproduct(*ps, site=site)


def pullback(f: PresheafMap, g: PresheafMap) -> Pullback:
    return Pullback(f, g)


def pushout(i: PresheafMap, j: PresheafMap) -> Pushout:
    return Pushout(i, j)


# --- hom-sets ---------------------------------------------------------------------

def _search_order(faces, degrees):
    """Greedy order in which every generator follows its faces.

    Ready generators of highest degree go first, since their faces pin them
    down; among vertices we prefer those that complete a higher cell soonest.
    """
    cofaces = [[] for _ in faces]
    for k, fs in enumerate(faces):
        for j in fs:
            cofaces[j].append(k)
    placed = [False] * len(faces)
    missing = [len(set(fs)) for fs in faces]
    ready = {k for k, m in enumerate(missing) if m == 0}
    order = []
    while ready:
        def score(k):
            near = max((len(set(faces[c])) - missing[c] for c in cofaces[k]), default=0)
            unlocks = sum(1 for c in cofaces[k] if missing[c] == 1)
            return (degrees[k], unlocks, near, -k)
        k = max(ready, key=score)
        ready.discard(k)
        placed[k] = True
        order.append(k)
        for c in set(cofaces[k]):
            missing[c] -= 1
            if missing[c] == 0:
                ready.add(c)
    if len(order) != len(faces):
        raise AssertionError("face of a generator is not generated earlier")
    return order


def _plan(p: Presheaf):
    plan = getattr(p, "_hom_plan", None)
    if plan is not None:
        return plan
    gens = p.generators()
    index = _generator_index(p)
    site = p.site
    raw = []
    for a, y in gens:
        cons = []
        for u in site.faces(a):
            b = site.source(u)
            sigma, e, z = p.decompose(b, p.act(u, y))
            cons.append((u, sigma, index[(e, z)]))
        raw.append(cons)
    order = _search_order([[j for _, _, j in cons] for cons in raw], [site.degree(a) for a, _ in gens])
    pos = {k: i for i, k in enumerate(order)}
    constraints = tuple(tuple((u, sigma, pos[j]) for u, sigma, j in raw[k]) for k in order)
    plan = (tuple(gens[k] for k in order), tuple(order), constraints)
    p._hom_plan = plan
    return plan


def hom_set(p: Presheaf, x: Presheaf, over=None) -> list:
    """All maps ``p -> x`` in canonical order.

    With ``over=(f, g)`` for ``f: x -> y`` and ``g: p -> y`` only the maps
    ``phi`` with ``f o phi == g`` are returned.
    """
    if p.site != x.site:
        raise ValueError(f"site mismatch: {p.site!r} vs {x.site!r}")
    gens, order, constraints = _plan(p)
    values = [None] * len(gens)
    found = []
    if over is not None:
        f, g = over
        wanted = [g.apply(a, y) for a, y in gens]

    def candidates(k):
        a, _ = gens[k]
        cons = constraints[k]
        if cons:
            u, sigma, j = cons[0]
            pool = x.face_index(a, u).get(x.act(sigma, values[j]), ())
            rest = cons[1:]
        else:
            pool = x.elements(a)
            rest = ()
        for w in pool:
            if over is not None and f.apply(a, w) != wanted[k]:
                continue
            if all(x.act(u, w) == x.act(sigma, values[j]) for u, sigma, j in rest):
                yield w

    def search(k):
        if k == len(gens):
            canon = [None] * len(gens)
            for i, v in zip(order, values):
                canon[i] = v
            found.append(tuple(canon))
            return
        for w in candidates(k):
            values[k] = w
            search(k + 1)
        values[k] = None

    search(0)
    found.sort(key=elem_key)
    return [PresheafMap(p, x, assignment=a, name="hom") for a in found]


# --- levelwise properties -----------------------------------------------------------

def _window(f: PresheafMap, window):
    if window is not None:
        return window
    dims = _max_dims(f.source.site, [f.source.dims, f.target.dims])
    if dims is None:
        raise ValueError("unbounded presheaves need an explicit window")
    return Window.bounded(f.source.site, dims)


def is_mono_map(f: PresheafMap, window=None) -> bool:
    for d in _window(f, window):
        images = [f.apply(d, x) for x in f.source.elements(d)]
        if len(set(images)) != len(images):
            return False
    return True


def is_epi_map(f: PresheafMap, window=None) -> bool:
    for d in _window(f, window):
        if {f.apply(d, x) for x in f.source.elements(d)} != set(f.target.elements(d)):
            return False
    return True


def is_iso_map(f: PresheafMap, window=None) -> bool:
    return is_mono_map(f, window) and is_epi_map(f, window)


def tabulate(p: Presheaf, window) -> Tabulated:
    """Explicit value and action tables over a closed window."""
    if not isinstance(window, Window):
        window = Window(p.site, tuple(tuple(d) for d in window))
    window.check_closed()
    site = p.site
    values = {d: p.elements(d) for d in window}
    action = {}
    for d in window:
        for e in window:
            for h in site.hom(d, e):
                action[h] = {x: p.act(h, x) for x in values[e]}
    return Tabulated(site, window.objects, values, action, name=f"tab({p.name})")


# --- JSON ---------------------------------------------------------------------------

def site_object_to_json(d):
    return [th.object_to_json(x) for x in d]


def site_object_from_json(data, site: Site):
    if len(data) != len(site):
        raise ValueError(f"expected {len(site)} factors, got {len(data)}")
    return tuple(th.object_from_json(x, n) for x, n in zip(data, site.levels))


def site_morphism_to_json(f):
    return [th.morphism_to_json(x) for x in f]


def site_morphism_from_json(data, source, target):
    return tuple(th.morphism_from_json(x, s, t) for x, s, t in zip(data, source, target))


def presentation_to_json(p: Presented) -> dict:
    site = p.site

    def ref(r):
        cid, u = r
        return [cid, site_object_to_json(site.source(u)), site_morphism_to_json(u)]

    return {
        "site": list(site.levels),
        "cells": [{"id": cid, "shape": site_object_to_json(shape)} for cid, shape in p.cells],
        "glue": [[ref(a), ref(b)] for a, b in p.glue],
    }


def presentation_from_json(data) -> Presented:
    if isinstance(data, str):
        data = json.loads(data)
    site = Site(tuple(data["site"]))
    cells = [(c["id"], site_object_from_json(c["shape"], site)) for c in data["cells"]]
    shapes = dict(cells)

    def ref(r):
        cid, src, u = r
        source = site_object_from_json(src, site)
        return cid, site_morphism_from_json(u, source, shapes[cid])

    glue = [(ref(a), ref(b)) for a, b in data.get("glue", [])]
    return Presented(site, cells, glue, name=data.get("name", "presented"))


def tabulated_to_json(t: Presheaf, window) -> dict:
    """Export with elements relabelled by their index at each object."""
    site = t.site
    objs = list(window)
    labels = {d: {x: i for i, x in enumerate(t.elements(d))} for d in objs}
    values = {json.dumps(site_object_to_json(d)): list(range(len(labels[d]))) for d in objs}
    action = {}
    for d in objs:
        for e in objs:
            for h in site.hom(d, e):
                k = json.dumps([site_object_to_json(d), site_object_to_json(e), site_morphism_to_json(h)])
                action[k] = [labels[d][t.act(h, x)] for x in t.elements(e)]
    return {"site": list(site.levels), "window": [site_object_to_json(d) for d in objs],
            "values": values, "action": action}


def tabulated_from_json(data) -> Tabulated:
    if isinstance(data, str):
        data = json.loads(data)
    site = Site(tuple(data["site"]))
    objs = [site_object_from_json(o, site) for o in data["window"]]
    values = {}
    for d in objs:
        values[d] = tuple(data["values"][json.dumps(site_object_to_json(d))])
    action = {}
    for k, table in data["action"].items():
        src, tgt, mor = json.loads(k)
        d, e = site_object_from_json(src, site), site_object_from_json(tgt, site)
        h = site_morphism_from_json(mor, d, e)
        action[h] = {x: table[x] for x in values[e]}
    return Tabulated(site, objs, values, action)
