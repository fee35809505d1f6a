"""Seeded random instances for property tests and fuzz suites.

Everything takes a ``random.Random`` so that a seed fixes the instance.
"""

from __future__ import annotations

import random

from . import theta as th
from .enriched import FreeEnrichedCategory, Nerve
from .presheaf import Extend, Presented, Presheaf, PresheafMap, SubGenerated, hom_set
from .reedy import outer_site
from .segal import reduction
from .site import DELTA, Site, Window, WindowError

__all__ = [
    "random_object",
    "random_site_object",
    "random_presented",
    "random_simplicial_set",
    "random_discrete_space",
    "random_sub_inclusion",
    "random_map",
    "random_segal_precategory",
    "random_free_category",
    "random_strict_object",
    "Relabeled",
    "random_nerve",
]


def random_object(rng: random.Random, level: int, max_degree: int) -> th.ThetaObject:
    return rng.choice(th.objects_up_to(level, max_degree))


def random_site_object(rng: random.Random, site: Site, max_degree: int) -> tuple:
    """A site object of total degree at most ``max_degree``."""
    while True:
        d = tuple(random_object(rng, n, max_degree) for n in site.levels)
        if site.degree(d) <= max_degree:
            return d


def random_presented(rng: random.Random, site: Site, max_cells: int = 3, max_degree: int = 2,
                     max_glue: int = 2, name="R") -> Presented:
    """Random cells glued along a few random parallel elements."""
    count = rng.randint(1, max_cells)
    cells = [(f"c{i}", random_site_object(rng, site, max_degree)) for i in range(count)]
    glue = []
    for _ in range(rng.randint(0, max_glue)):
        (c1, s1), (c2, s2) = rng.choice(cells), rng.choice(cells)
        low = min(site.degree(s1), site.degree(s2))
        e = random_site_object(rng, site, rng.randint(0, low))
        h1, h2 = site.hom(e, s1), site.hom(e, s2)
        if h1 and h2:
            glue.append(((c1, rng.choice(h1)), (c2, rng.choice(h2))))
    return Presented(site, cells, glue, name=name)


def random_simplicial_set(rng: random.Random, max_cells: int = 2, max_dim: int = 2) -> Presented:
    return random_presented(rng, DELTA, max_cells, max_dim, name="K")


def random_discrete_space(rng: random.Random, site: Site = Site((1, 1)), **kw) -> Presheaf:
    """A simplicial space constant in the space factor (factor 0)."""
    return Extend(random_simplicial_set(rng, **kw), site, (1,))


def random_sub_inclusion(rng: random.Random, Y: Presheaf) -> PresheafMap:
    """Inclusion of the subobject generated by a random set of generators."""
    gens = [g for g in Y.generators() if rng.random() < 0.5]
    return SubGenerated(Y, gens, name="sub").inclusion()


def random_map(rng: random.Random, X: Presheaf, Y: Presheaf):
    maps = hom_set(X, Y)
    return rng.choice(maps) if maps else None


def random_segal_precategory(rng: random.Random, inner: Site = Site((1,)), max_cells: int = 2,
                             max_degree: int = 2) -> Presheaf:
    """The reduction of a random outer diagram."""
    X = random_presented(rng, outer_site(inner), max_cells, max_degree, name="X")
    return reduction(X).diagram


def random_free_category(rng: random.Random, inner: Site = Site((1,)), max_objects: int = 3,
                         max_cells: int = 2, max_degree: int = 1) -> FreeEnrichedCategory:
    k = rng.randint(1, max_objects)
    objs = [f"o{i}" for i in range(k)]
    edges = {}
    for i in range(k):
        for j in range(i + 1, k):
            if rng.random() < 0.6:
                edges[(objs[i], objs[j])] = random_presented(
                    rng, inner, max_cells, max_degree, name=f"A{i}{j}")
    return FreeEnrichedCategory(inner, objs, edges, name="C")


def random_strict_object(rng: random.Random, inner: Site = Site((1,)), max_level: int = 3):
    """A relabelled copy of a random nerve, with its inner window dims.

    The copy is no longer literally a nerve, so a round trip through
    strictification has real work to do.
    """
    C = random_free_category(rng, inner)
    N = Nerve(C)
    dims = C.inner_dims()
    # one spare outer level: Segal checks probe phi_(k+1) past the declared dims
    window = Window.bounded(N.site, (max_level + 1,) + dims)
    return Relabeled(N, window, rng, dims=(max_level,) + dims), dims


class Relabeled(Presheaf):
    """A copy of ``P`` whose elements are renamed by a random bijection per object.

    Only objects of the given window are supported.
    """

    def __init__(self, P: Presheaf, window, rng: random.Random, dims=None):
        super().__init__(P.site, P.dims if dims is None else dims)
        self.P = P
        self.name = f"relabel({P.name})"
        self.fwd, self.bwd = {}, {}
        for d in window:
            xs = list(P.elements(d))
            labels = list(range(len(xs)))
            rng.shuffle(labels)
            self.fwd[d] = dict(zip(xs, labels))
            self.bwd[d] = dict(zip(labels, xs))

    def _compute(self, d):
        if d not in self.fwd:
            raise WindowError(f"{d!r} is outside the relabelled window")
        return self.fwd[d].values()

    def _act(self, f, x):
        src, tgt = self.P.site.source(f), self.P.site.target(f)
        if src not in self.fwd or tgt not in self.fwd:
            raise WindowError("morphism outside the relabelled window")
        return self.fwd[src][self.P.act(f, self.bwd[tgt][x])]

    def iso(self) -> PresheafMap:
        """``P -> self``."""
        return PresheafMap(self.P, self, lambda d, x: self.fwd[d][x], name="relabel")


def random_nerve(rng: random.Random, **kw) -> Nerve:
    return Nerve(random_free_category(rng, **kw))
