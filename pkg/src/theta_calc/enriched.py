"""Categories enriched in set-valued presheaves, their nerves and strictification."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from graphlib import CycleError, TopologicalSorter

from . import theta as th
from .presheaf import Discrete, Presheaf, PresheafMap, elem_key
from .reedy import SegalPreObject, _diagram, fiber, level, outer_site, vertex_labels
from .segal import DescentError, HoCategory, Pi0, _bijection_witness, is_segal_strict, segal_map
from .site import Site, Window

__all__ = [
    "EnrichedCategory",
    "FreeEnrichedCategory",
    "OrdinaryCategory",
    "StrictifiedCategory",
    "EnrichedFunctor",
    "UA",
    "Nerve",
    "nerve",
    "nerve_map",
    "strictify",
    "nerve_unit",
    "strict_counit",
    "pi0_category",
    "dk_check_enriched",
    "category_to_json",
]


class EnrichedCategory:
    """Objects, hom presheaves, units at the terminal inner object, and composition."""

    site: Site
    objects: tuple

    def hom(self, x, y) -> Presheaf:
        raise NotImplementedError

    def unit(self, x):
        """The identity of ``x`` as an element of ``hom(x, x)`` at the terminal object."""
        raise NotImplementedError

    def compose(self, d, g, f):
        """``g o f`` for ``f`` in ``hom(x, y)(d)`` and ``g`` in ``hom(y, z)(d)``."""
        raise NotImplementedError

    def unit_at(self, x, d):
        h = self.hom(x, x)
        return h.act(self.site.to_terminal(d), self.unit(x))

    def check_laws(self, window) -> bool:
        """Unit and associativity laws elementwise on a window."""
        objs = self.objects
        for d in window:
            for x, y in itertools.product(objs, repeat=2):
                for f in self.hom(x, y).elements(d):
                    if self.compose(d, self.unit_at(y, d), f) != f:
                        return False
                    if self.compose(d, f, self.unit_at(x, d)) != f:
                        return False
            for x, y, z, w in itertools.product(objs, repeat=4):
                for f in self.hom(x, y).elements(d):
                    for g in self.hom(y, z).elements(d):
                        gf = self.compose(d, g, f)
                        for h in self.hom(z, w).elements(d):
                            if self.compose(d, h, gf) != self.compose(d, self.compose(d, h, g), f):
                                return False
        return True

    def check_natural(self, window) -> bool:
        """Composition commutes with restriction along window morphisms."""
        objs, site = self.objects, self.site
        for d in window:
            for e in window:
                for u in site.hom(d, e):
                    for x, y, z in itertools.product(objs, repeat=3):
                        hxy, hyz, hxz = self.hom(x, y), self.hom(y, z), self.hom(x, z)
                        for f in hxy.elements(e):
                            for g in hyz.elements(e):
                                lhs = hxz.act(u, self.compose(e, g, f))
                                if lhs != self.compose(d, hyz.act(u, g), hxy.act(u, f)):
                                    return False
        return True

    def inner_dims(self):
        dims = [self.hom(x, y).dims for x in self.objects for y in self.objects]
        if any(v is None for v in dims):
            return None
        return tuple(max(v) for v in zip(*dims)) if dims else (0,) * len(self.site)


class PathHom(Presheaf):
    """Coproduct over paths of products of edge labels; elements are ``(path, values)``."""

    def __init__(self, site: Site, paths, edges: dict, name="hom"):
        sums = []
        for path in paths:
            dims = [edges[e].dims for e in path]
            if any(v is None for v in dims):
                sums = None
                break
            sums.append(tuple(sum(v) for v in zip(*dims)) if dims else (0,) * len(site))
        dims = None if sums is None else (
            tuple(max(v) for v in zip(*sums)) if sums else (0,) * len(site))
        super().__init__(site, dims)
        self.paths, self.edges, self.name = tuple(paths), edges, name

    def _compute(self, d):
        return [(path, vals) for path in self.paths
                for vals in itertools.product(*(self.edges[e].elements(d) for e in path))]

    def _act(self, f, x):
        path, vals = x
        return (path, tuple(self.edges[e].act(f, v) for e, v in zip(path, vals)))


class FreeEnrichedCategory(EnrichedCategory):
    """Free on a finite DAG whose edges carry presheaves.

    ``hom(x, y)`` is the coproduct over directed paths of the product of the
    edge labels; composition concatenates paths.
    """

    def __init__(self, site: Site, objects, edges: dict, name="free"):
        self.site = site
        self.objects = tuple(sorted(objects, key=elem_key))
        self.edges = {tuple(k): v for k, v in edges.items()}
        self.name = name
        for (x, y), p in self.edges.items():
            if x not in self.objects or y not in self.objects:
                raise ValueError(f"edge {(x, y)!r} uses an unknown object")
            if x == y:
                raise ValueError("loops are not allowed")
            if p.site != site:
                raise ValueError("edge label lives on the wrong site")
        graph = {x: {a for (a, b) in self.edges if b == x} for x in self.objects}
        try:
            tuple(TopologicalSorter(graph).static_order())
        except CycleError:
            raise ValueError("the edge graph must be acyclic") from None
        self.paths = {}
        for x in self.objects:
            for y in self.objects:
                self.paths[(x, y)] = tuple(self._paths(x, y))
        self._homs = {}

    def _paths(self, x, y):
        if x == y:
            yield ()
            return
        for (a, b) in sorted(self.edges, key=elem_key):
            if a == x:
                for rest in self._paths(b, y):
                    yield ((a, b),) + rest

    def hom(self, x, y):
        h = self._homs.get((x, y))
        if h is None:
            h = PathHom(self.site, self.paths[(x, y)], self.edges, name=f"hom({x!r},{y!r})")
            self._homs[(x, y)] = h
        return h

    def unit(self, x):
        return ((), ())

    def compose(self, d, g, f):
        return (f[0] + g[0], f[1] + g[1])


class OrdinaryCategory(EnrichedCategory):
    """A finite ordinary category with discrete hom presheaves."""

    def __init__(self, site: Site, objects, homs: dict, comp: dict, ident: dict, name="cat"):
        self.site = site
        self.objects = tuple(sorted(objects, key=elem_key))
        self.labels = {k: tuple(v) for k, v in homs.items()}
        self.comp = dict(comp)
        self.ident = dict(ident)
        self.name = name
        self._homs = {}

    def hom(self, x, y):
        h = self._homs.get((x, y))
        if h is None:
            h = Discrete(self.site, self.labels.get((x, y), ()), name=f"hom({x!r},{y!r})")
            self._homs[(x, y)] = h
        return h

    def unit(self, x):
        return self.ident[x]

    def compose(self, d, g, f):
        return self.comp[(g, f)]

    @classmethod
    def groupoid_iso(cls, site: Site, a="a", b="b"):
        """Two objects and a single isomorphism between them."""
        homs = {(a, a): ("1a",), (b, b): ("1b",), (a, b): ("u",), (b, a): ("v",)}
        ident = {a: "1a", b: "1b"}
        comp = {}
        table = {("u", "v"): "1b", ("v", "u"): "1a"}
        src = {"1a": a, "1b": b, "u": a, "v": b}
        tgt = {"1a": a, "1b": b, "u": b, "v": a}
        for g in src:
            for f in src:
                if tgt[f] == src[g]:
                    if f in ident.values():
                        comp[(g, f)] = g
                    elif g in ident.values():
                        comp[(g, f)] = f
                    else:
                        comp[(g, f)] = table[(g, f)]
        return cls(site, (a, b), homs, comp, ident, name="iso")


class StrictifiedCategory(EnrichedCategory):
    """The enriched category extracted from a strict Segal object."""

    def __init__(self, X, dims=None):
        self.X = _diagram(X)
        x0 = level(self.X, 0)
        self.site = x0.site
        self.objects = x0.elements(self.site.terminal())
        self.name = f"strict({self.X.name})"
        self._homs = {}
        self._inverse = {}
        self._dims = dims

    def hom(self, x, y):
        h = self._homs.get((x, y))
        if h is None:
            h = fiber(self.X, 1, (x, y))
            self._homs[(x, y)] = h
        return h

    def unit(self, x):
        star = self.site.terminal()
        s0 = (th.codegeneracy(0, 0),) + self.site.identity(star)
        return self.X.act(s0, x)

    def _phi2_inverse(self, d):
        found = self._inverse.get(d)
        if found is None:
            phi = segal_map(self.X, 2)
            found = {phi.apply(d, x): x for x in phi.source.elements(d)}
            self._inverse[d] = found
        return found

    def compose(self, d, g, f):
        x2 = self._phi2_inverse(d)[(f, g)]
        return self.X.act((th.coface(2, 1),) + self.site.identity(d), x2)


def UA(A: Presheaf, x="x", y="y") -> FreeEnrichedCategory:
    """Two objects with ``hom(x, y) = A`` and nothing else."""
    return FreeEnrichedCategory(A.site, (x, y), {(x, y): A}, name=f"U({A.name})")


class EnrichedFunctor:
    def __init__(self, source: EnrichedCategory, target: EnrichedCategory, obj: dict, homs: dict):
        self.source, self.target = source, target
        self.obj = dict(obj)
        self.homs = dict(homs)   # (x, y) -> PresheafMap hom(x, y) -> hom(Fx, Fy)

    def check(self, window) -> bool:
        C, D = self.source, self.target
        star = C.site.terminal()
        for x in C.objects:
            if self.homs[(x, x)].apply(star, C.unit(x)) != D.unit(self.obj[x]):
                return False
        for d in window:
            for x, y, z in itertools.product(C.objects, repeat=3):
                for f in C.hom(x, y).elements(d):
                    for g in C.hom(y, z).elements(d):
                        lhs = self.homs[(x, z)].apply(d, C.compose(d, g, f))
                        rhs = D.compose(d, self.homs[(y, z)].apply(d, g),
                                        self.homs[(x, y)].apply(d, f))
                        if lhs != rhs:
                            return False
        return True

    @classmethod
    def identity(cls, C: EnrichedCategory):
        return cls(C, C, {x: x for x in C.objects},
                   {(x, y): PresheafMap.identity(C.hom(x, y)) for x in C.objects for y in C.objects})


# --- nerves --------------------------------------------------------------------------

class Nerve(Presheaf):
    """``N(C)_p = coproduct over (z_0..z_p) of hom(z_0, z_1) x ... x hom(z_{p-1}, z_p)``.

    Elements are ``(objects, morphisms)`` pairs of tuples.
    """

    def __init__(self, C: EnrichedCategory):
        dims = None
        inner = C.inner_dims()
        if isinstance(C, FreeEnrichedCategory) and inner is not None:
            longest = max((len(p) for ps in C.paths.values() for p in ps), default=0)
            dims = (longest,) + tuple(max(1, longest) * v for v in inner)
        super().__init__(outer_site(C.site), dims)
        self.C = C
        self.name = f"N({getattr(C, 'name', 'C')})"

    def _compute(self, d):
        C = self.C
        p, inner = d[0].m, d[1:]
        out = []
        for zs in itertools.product(C.objects, repeat=p + 1):
            homs = [C.hom(zs[i], zs[i + 1]).elements(inner) for i in range(p)]
            for ms in itertools.product(*homs):
                out.append((zs, ms))
        return out

    def _act(self, f, x):
        C = self.C
        alpha, g = f[0], f[1:]
        zs, ms = x
        inner = self.site.source(f)[1:]
        ms = tuple(C.hom(zs[i], zs[i + 1]).act(g, m) for i, m in enumerate(ms))
        new_z = tuple(zs[v] for v in alpha.delta)
        new_m = []
        for j in range(1, len(alpha.delta)):
            lo, hi = alpha.delta[j - 1], alpha.delta[j]
            acc = C.unit_at(zs[lo], inner)
            for i in range(lo, hi):
                acc = C.compose(inner, ms[i], acc)
            new_m.append(acc)
        return (new_z, tuple(new_m))


def nerve(C: EnrichedCategory, dims=None) -> SegalPreObject:
    N = Nerve(C)
    return SegalPreObject(N, dims=dims, check=N.dims is not None or dims is not None)


def nerve_map(F: EnrichedFunctor, NC=None, ND=None) -> PresheafMap:
    NC = NC or Nerve(F.source)
    ND = ND or Nerve(F.target)

    def fn(d, x):
        zs, ms = x
        return (tuple(F.obj[z] for z in zs),
                tuple(F.homs[(zs[i], zs[i + 1])].apply(d[1:], m) for i, m in enumerate(ms)))

    return PresheafMap(NC, ND, fn, name="N(F)")


def strictify(X, dims=None) -> StrictifiedCategory:
    verdict = is_segal_strict(X, dims=dims)
    if not verdict:
        raise ValueError(f"not a strict Segal object: {verdict.witness}")
    return StrictifiedCategory(X, dims)


def nerve_unit(X, dims=None) -> PresheafMap:
    """``X -> N(strictify X)``: a cell goes to its vertex labels and its spine edges."""
    D = _diagram(X)
    N = Nerve(strictify(X, dims))

    def fn(d, x):
        p, inner = d[0].m, d[1:]
        ident = tuple(th.identity(o) for o in inner)
        edges = tuple(D.act((th.delta_map(1, p, (i - 1, i)),) + ident, x) for i in range(1, p + 1))
        return (vertex_labels(D, d, x), edges)

    return PresheafMap(D, N, fn, name="R")


def strict_counit(C: EnrichedCategory, dims=None) -> EnrichedFunctor:
    """``C -> strictify(N C)``, sending ``m`` to the 1-simplex ``((x, y), (m,))``."""
    S = strictify(nerve(C, dims), dims)
    obj = {x: ((x,), ()) for x in C.objects}
    homs = {
        (x, y): PresheafMap(C.hom(x, y), S.hom(obj[x], obj[y]),
                            lambda d, m, x=x, y=y: ((x, y), (m,)), name="c")
        for x in C.objects for y in C.objects
    }
    return EnrichedFunctor(C, S, obj, homs)


# --- pi_0 and DK ------------------------------------------------------------------------

def pi0_category(C: EnrichedCategory) -> HoCategory:
    star = C.site.terminal()
    pis, hom, label_of = {}, {}, {}
    for x in C.objects:
        for y in C.objects:
            pi = Pi0(C.hom(x, y))
            pis[(x, y)] = pi
            hom[(x, y)] = tuple(((x, y), c) for c in pi.classes)
            for e, c in pi.of_point.items():
                label_of[((x, y), e)] = ((x, y), c)
    comp = {}
    for x, y, z in itertools.product(C.objects, repeat=3):
        for f in hom[(x, y)]:
            for g in hom[(y, z)]:
                results = {
                    label_of[((x, z), C.compose(star, ge, fe))]
                    for fe in pis[(x, y)].members(f[1]) for ge in pis[(y, z)].members(g[1])
                }
                if len(results) != 1:
                    raise DescentError(f"composition of {g!r} and {f!r} does not descend")
                comp[(g, f)] = results.pop()
    ident = {x: label_of[((x, x), C.unit(x))] for x in C.objects}
    return HoCategory(C.objects, hom, comp, ident)


@dataclass
class EnrichedDKVerdict:
    ok: bool
    w1: bool
    w2: bool
    witness: dict = None

    def __bool__(self):
        return self.ok


def dk_check_enriched(F: EnrichedFunctor, window: Window = None) -> EnrichedDKVerdict:
    C, D = F.source, F.target
    if window is None:
        dims = [v for v in (C.inner_dims(), D.inner_dims()) if v is not None]
        if not dims:
            raise ValueError("unbounded homs; give a window")
        window = Window.bounded(C.site, tuple(max(v) for v in zip(*dims)))
    w1, witness = True, None
    for x in C.objects:
        for y in C.objects:
            w = _bijection_witness(F.homs[(x, y)], window)
            if w is not None:
                w1, witness = False, dict(w, pair=[repr(x), repr(y)])
                break
        if not w1:
            break
    pc, pd = pi0_category(C), pi0_category(D)
    star = C.site.terminal()
    mor = {}
    for (x, y), ms in pc.hom.items():
        pi = Pi0(C.hom(x, y))
        piy = Pi0(D.hom(F.obj[x], F.obj[y]))
        for m in ms:
            e = pi.members(m[1])[0]
            mor[m] = ((F.obj[x], F.obj[y]), piy.of_point[F.homs[(x, y)].apply(star, e)])
    full = all(
        sorted((mor[m] for m in pc.hom[(x, y)]), key=repr)
        == sorted(pd.hom[(F.obj[x], F.obj[y])], key=repr)
        for x in C.objects for y in C.objects
    )
    ess = all(any(pd.isomorphic(F.obj[x], b) for x in C.objects) for b in pd.objects)
    w2 = full and ess
    if witness is None and not w2:
        witness = {"kind": "not fully faithful" if not full else "not essentially surjective"}
    return EnrichedDKVerdict(w1 and w2, w1, w2, witness)


def category_to_json(C: EnrichedCategory, window) -> dict:
    from .presheaf import tabulated_to_json

    objs = list(C.objects)
    return {
        "objects": [repr(x) for x in objs],
        "homs": {f"{x!r}|{y!r}": tabulated_to_json(C.hom(x, y), window) for x in objs for y in objs},
        "units": {repr(x): repr(C.unit(x)) for x in objs},
    }
