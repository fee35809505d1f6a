"""Finite products of the categories Theta_n.

A site object is a tuple with one Theta object per factor, and a site
morphism is a tuple of Theta morphisms.  The simplicial-set site is
``Site((1,))``, Theta_n-spaces live on ``Site((1, n))`` and outer-simplicial
diagrams of them on ``Site((1, 1, n))``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from . import theta as th

__all__ = ["Site", "Window", "WindowError", "DELTA"]


class WindowError(ValueError):
    """Raised when a computation needs an object outside a tabulated window."""


@dataclass(frozen=True)
class Site:
    levels: tuple

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        if not self.levels:
            raise ValueError("a site needs at least one factor")
        if any(n < 0 for n in self.levels):
            raise ValueError("levels must be non-negative")

    def __len__(self):
        return len(self.levels)

    def __repr__(self):
        return f"Site{self.levels}"

    # objects ----------------------------------------------------------------

    def degree(self, d) -> int:
        return sum(x.degree for x in d)

    def degrees(self, d) -> tuple:
        return tuple(x.degree for x in d)

    def terminal(self) -> tuple:
        return tuple(th.terminal(n) for n in self.levels)

    def check_object(self, d) -> None:
        if len(d) != len(self.levels) or any(x.level != n for x, n in zip(d, self.levels)):
            raise ValueError(f"{d!r} is not an object of {self!r}")

    def objects(self, dims) -> tuple:
        """Objects whose degree in factor ``i`` is at most ``dims[i]``."""
        return _objects(self.levels, tuple(dims))

    def points(self, d) -> tuple:
        """The canonical point ``terminal -> d`` (vertex 0 in every factor)."""
        return tuple(th.vertex(x, 0) for x in d)

    def to_terminal(self, d) -> tuple:
        return tuple(th.terminal_map(x) for x in d)

    # morphisms --------------------------------------------------------------

    def identity(self, d) -> tuple:
        return tuple(th.identity(x) for x in d)

    def compose(self, g, f) -> tuple:
        return tuple(th.compose(gi, fi) for gi, fi in zip(g, f))

    def hom(self, d, e) -> tuple:
        return _hom(d, e)

    def source(self, f) -> tuple:
        return tuple(x.source for x in f)

    def target(self, f) -> tuple:
        return tuple(x.target for x in f)

    def is_mono(self, f) -> bool:
        return all(th.is_mono(x) for x in f)

    def codegeneracies(self, d) -> tuple:
        """``(sigma, section)`` pairs, elementary in exactly one factor."""
        return _codegeneracies(d)

    def faces(self, d) -> tuple:
        """Generating monos into ``d``: elementary in one factor, identity elsewhere."""
        return _faces(d)

    def monos_into(self, d) -> tuple:
        return _monos_into(d)

    def replace(self, d, i: int, x):
        return d[:i] + (x,) + d[i + 1:]


DELTA = Site((1,))


@lru_cache(maxsize=None)
def _objects(levels, dims):
    return tuple(itertools.product(*(th.objects_up_to(n, k) for n, k in zip(levels, dims))))


@lru_cache(maxsize=None)
def _hom(d, e):
    return tuple(itertools.product(*(th.hom_enumerate(x, y) for x, y in zip(d, e))))


def _lift(d, i, f):
    """Embed a morphism of factor ``i`` as a site morphism (identities elsewhere)."""
    return tuple(f if k == i else th.identity(x) for k, x in enumerate(d))


@lru_cache(maxsize=None)
def _codegeneracies(d):
    out = []
    for i, x in enumerate(d):
        for sigma, s in th.codegeneracies_with_sections(x):
            tgt = d[:i] + (sigma.target,) + d[i + 1:]
            out.append((_lift(d, i, sigma), _lift(tgt, i, s)))
    return tuple(out)


@lru_cache(maxsize=None)
def _faces(d):
    out = []
    for i, x in enumerate(d):
        for u in th.elementary_faces(x):
            src = d[:i] + (u.source,) + d[i + 1:]
            out.append(_lift(src, i, u))
    return tuple(out)


@lru_cache(maxsize=None)
def _monos_into(d):
    per = [(th.identity(x),) + th.monos_into(x) for x in d]
    ident = tuple(th.identity(x) for x in d)
    return tuple(f for f in itertools.product(*per) if f != ident)


@dataclass(frozen=True)
class Window:
    """A finite, degree-bounded set of site objects.

    ``Window.bounded(site, dims)`` is closed under targets of elementary
    codegeneracies and sources of monos, since both lower degrees.
    """

    site: Site
    objects: tuple
    dims: tuple = None

    @classmethod
    def bounded(cls, site: Site, dims) -> "Window":
        dims = tuple(dims)
        return cls(site, site.objects(dims), dims)

    def __iter__(self):
        return iter(self.objects)

    def __len__(self):
        return len(self.objects)

    def __contains__(self, d):
        return d in set(self.objects)

    def check_closed(self) -> None:
        have = set(self.objects)
        for d in self.objects:
            for sigma, _ in self.site.codegeneracies(d):
                if self.site.target(sigma) not in have:
                    raise WindowError(f"window not closed: missing codegeneracy target of {d!r}")
            for u in self.site.faces(d):
                if self.site.source(u) not in have:
                    raise WindowError(f"window not closed: missing face source of {d!r}")
