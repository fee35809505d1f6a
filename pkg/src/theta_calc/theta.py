"""The cell categories Theta_n, built by iterating the wreath construction.

Objects are ``[m](c_1, ..., c_m)`` with each ``c_i`` an object one level down;
the single level-0 object is the terminal category's object.  A morphism
``[m](c) -> [q](d)`` is a monotone ``delta: [m] -> [q]`` together with a block
``f_ij: c_i -> d_j`` for every ``delta(i-1) < j <= delta(i)``.

Objects and morphisms are hash-consed: constructing the same value twice
returns the same instance, so equality is identity and hashing is cheap.
"""

from __future__ import annotations

import itertools
import json
import re
from functools import lru_cache
from typing import NamedTuple

__all__ = [
    "ThetaObject",
    "ThetaMorphism",
    "Classification",
    "obj",
    "terminal",
    "identity",
    "compose",
    "hom_enumerate",
    "classify",
    "is_mono",
    "is_split_epi",
    "jointly_mono",
    "elementary_codegeneracies",
    "codegeneracies_with_sections",
    "factor_epi_mono",
    "objects_up_to",
    "monos_into",
    "elementary_faces",
    "vertex",
    "terminal_map",
    "object_to_json",
    "object_from_json",
    "morphism_to_json",
    "morphism_from_json",
    "parse_object",
    "simplex",
    "delta_map",
    "coface",
    "codegeneracy",
]


class ThetaObject:
    __slots__ = ("level", "children", "degree", "key")
    _table: dict = {}

    def __new__(cls, level: int, children=()):
        children = tuple(children)
        ident = (level, tuple(id(c) for c in children))
        found = cls._table.get(ident)
        if found is not None:
            return found
        if level < 0:
            raise ValueError("level must be non-negative")
        if level == 0 and children:
            raise ValueError("the level-0 object has no children")
        for c in children:
            if not isinstance(c, ThetaObject) or c.level != level - 1:
                raise ValueError(f"children of a level-{level} object must have level {level - 1}")
        self = object.__new__(cls)
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "children", children)
        object.__setattr__(self, "degree", len(children) + sum(c.degree for c in children))
        object.__setattr__(self, "key", (level, tuple(c.key for c in children)))
        return cls._table.setdefault(ident, self)

    def __setattr__(self, name, value):
        raise AttributeError("ThetaObject is immutable")

    def __reduce__(self):
        return (ThetaObject, (self.level, self.children))

    def __lt__(self, other):
        return self.key < other.key

    @property
    def m(self) -> int:
        return len(self.children)

    def __repr__(self):
        return object_to_str(self)


class ThetaMorphism:
    __slots__ = ("source", "target", "delta", "blocks", "key")
    _table: dict = {}

    def __new__(cls, source: ThetaObject, target: ThetaObject, delta=(), blocks=()):
        delta = tuple(delta)
        blocks = tuple(tuple(row) for row in blocks)
        ident = (id(source), id(target), delta, tuple(tuple(id(b) for b in row) for row in blocks))
        found = cls._table.get(ident)
        if found is not None:
            return found
        _check_morphism(source, target, delta, blocks)
        self = object.__new__(cls)
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(
            self,
            "key",
            (delta, tuple(tuple(b.key for b in row) for row in blocks), source.key, target.key),
        )
        return cls._table.setdefault(ident, self)

    def __setattr__(self, name, value):
        raise AttributeError("ThetaMorphism is immutable")

    def __reduce__(self):
        return (ThetaMorphism, (self.source, self.target, self.delta, self.blocks))

    def __lt__(self, other):
        return self.key < other.key

    @property
    def level(self) -> int:
        return self.source.level

    def block(self, i: int, j: int) -> "ThetaMorphism":
        """The block ``f_ij`` (1-based indices, as in the bracket notation)."""
        lo = self.delta[i - 1]
        if not lo < j <= self.delta[i]:
            raise KeyError((i, j))
        return self.blocks[i - 1][j - lo - 1]

    def __repr__(self):
        return f"{self.source!r}->{self.target!r}:{morphism_to_str(self)}"


def _check_morphism(source, target, delta, blocks):
    if source.level != target.level:
        raise ValueError("source and target must have the same level")
    if source.level == 0:
        if delta or blocks:
            raise ValueError("level-0 morphisms carry no data")
        return
    m, q = source.m, target.m
    if len(delta) != m + 1:
        raise ValueError(f"delta must have length {m + 1}")
    if any(not 0 <= v <= q for v in delta) or any(a > b for a, b in zip(delta, delta[1:])):
        raise ValueError(f"delta {delta} is not a monotone map [{m}] -> [{q}]")
    if len(blocks) != m:
        raise ValueError("one block row per child of the source")
    for i in range(1, m + 1):
        row = blocks[i - 1]
        lo, hi = delta[i - 1], delta[i]
        if len(row) != hi - lo:
            raise ValueError(f"row {i} must hold blocks for j in ({lo}, {hi}]")
        for j, f in zip(range(lo + 1, hi + 1), row):
            if not isinstance(f, ThetaMorphism):
                raise TypeError("blocks must be ThetaMorphisms")
            if f.source is not source.children[i - 1] or f.target is not target.children[j - 1]:
                raise ValueError(f"block ({i},{j}) has the wrong source or target")


def obj(level: int, *children: ThetaObject) -> ThetaObject:
    return ThetaObject(level, children)


@lru_cache(maxsize=None)
def terminal(level: int) -> ThetaObject:
    """``[0]`` at the given level (the level-0 object when ``level == 0``)."""
    return ThetaObject(level, ())


@lru_cache(maxsize=None)
def identity(a: ThetaObject) -> ThetaMorphism:
    if a.level == 0:
        return ThetaMorphism(a, a)
    return ThetaMorphism(a, a, range(a.m + 1), [(identity(c),) for c in a.children])


@lru_cache(maxsize=None)
def terminal_map(a: ThetaObject) -> ThetaMorphism:
    """The unique map from ``a`` to the terminal object of its level."""
    t = terminal(a.level)
    if a.level == 0:
        return ThetaMorphism(a, t)
    return ThetaMorphism(a, t, (0,) * (a.m + 1), [()] * a.m)


@lru_cache(maxsize=None)
def vertex(a: ThetaObject, i: int) -> ThetaMorphism:
    """The point ``[0] -> a`` picking vertex ``i``."""
    t = terminal(a.level)
    if a.level == 0:
        return ThetaMorphism(t, a)
    return ThetaMorphism(t, a, (i,), ())


@lru_cache(maxsize=None)
def compose(g: ThetaMorphism, f: ThetaMorphism) -> ThetaMorphism:
    """``g o f``.  Raises ``ValueError`` unless ``f.target is g.source``."""
    if f.target is not g.source:
        raise ValueError("cannot compose: target of f differs from source of g")
    if f.level == 0:
        return ThetaMorphism(f.source, g.target)
    df, dg = f.delta, g.delta
    delta = tuple(dg[v] for v in df)
    rows = []
    for i in range(1, len(df)):
        row = []
        # the intervals (dg[j-1], dg[j]] for df[i-1] < j <= df[i] tile the result row
        for j in range(df[i - 1] + 1, df[i] + 1):
            fij = f.blocks[i - 1][j - df[i - 1] - 1]
            for gjk in g.blocks[j - 1]:
                row.append(compose(gjk, fij))
        rows.append(row)
    return ThetaMorphism(f.source, g.target, delta, rows)


@lru_cache(maxsize=None)
def hom_enumerate(a: ThetaObject, b: ThetaObject) -> tuple:
    """All morphisms ``a -> b`` in canonical (lexicographic) order."""
    if a.level != b.level:
        raise ValueError("objects live at different levels")
    if a.level == 0:
        return (ThetaMorphism(a, b),)
    out = []
    m, q = a.m, b.m
    for delta in itertools.combinations_with_replacement(range(q + 1), m + 1):
        choices = []
        for i in range(1, m + 1):
            for j in range(delta[i - 1] + 1, delta[i] + 1):
                choices.append(hom_enumerate(a.children[i - 1], b.children[j - 1]))
        for flat in itertools.product(*choices):
            rows, pos = [], 0
            for i in range(1, m + 1):
                width = delta[i] - delta[i - 1]
                rows.append(flat[pos:pos + width])
                pos += width
            out.append(ThetaMorphism(a, b, delta, rows))
    out.sort(key=lambda f: f.key)
    return tuple(out)


def jointly_mono(maps, source: ThetaObject) -> bool:
    """Whether a family of maps out of ``source`` is jointly monic.

    The empty family is jointly monic exactly when ``source`` is terminal.
    """
    if source.level == 0:
        return True
    maps = list(maps)
    for i in range(1, source.m + 1):
        if not any(f.delta[i - 1] < f.delta[i] for f in maps):
            return False
        family = [b for f in maps for b in f.blocks[i - 1]]
        if not jointly_mono(family, source.children[i - 1]):
            return False
    return True


@lru_cache(maxsize=None)
def is_mono(f: ThetaMorphism) -> bool:
    return jointly_mono([f], f.source)


@lru_cache(maxsize=None)
def is_split_epi(f: ThetaMorphism) -> bool:
    ident = identity(f.target)
    return any(compose(f, s) is ident for s in hom_enumerate(f.target, f.source))


class Classification(NamedTuple):
    mono: bool
    split_epi: bool
    iso: bool


def classify(f: ThetaMorphism) -> Classification:
    mono = is_mono(f)
    epi = is_split_epi(f)
    return Classification(mono, epi, mono and epi)


@lru_cache(maxsize=None)
def codegeneracies_with_sections(a: ThetaObject) -> tuple:
    """Pairs ``(sigma, section)`` for each elementary codegeneracy out of ``a``.

    Vertical ones collapse a codegeneracy inside some ``c_i``; horizontal ones
    merge vertices ``i-1`` and ``i`` of ``[m]`` and exist only where ``c_i`` has
    degree 0.
    """
    n = a.level
    if n == 0:
        return ()
    kids = a.children
    m = len(kids)
    out = []
    for i in range(1, m + 1):
        for tau, t in codegeneracies_with_sections(kids[i - 1]):
            new = kids[:i - 1] + (tau.target,) + kids[i:]
            b = ThetaObject(n, new)
            rows = [(identity(c),) for c in kids]
            back = [(identity(c),) for c in new]
            rows[i - 1] = (tau,)
            back[i - 1] = (t,)
            out.append((ThetaMorphism(a, b, range(m + 1), rows), ThetaMorphism(b, a, range(m + 1), back)))
    for i in range(1, m + 1):
        if kids[i - 1].degree != 0:
            continue
        new = kids[:i - 1] + kids[i:]
        b = ThetaObject(n, new)
        delta = [k if k < i else k - 1 for k in range(m + 1)]
        rows = [(identity(c),) if k != i else () for k, c in enumerate(kids, 1)]
        sigma = ThetaMorphism(a, b, delta, rows)
        tdelta = [k if k < i else k + 1 for k in range(m)]
        back = []
        for k in range(1, m):
            if k < i:
                back.append((identity(kids[k - 1]),))
            elif k == i:
                back.append((terminal_map(kids[i]), identity(kids[i])))
            else:
                back.append((identity(kids[k]),))
        out.append((sigma, ThetaMorphism(b, a, tdelta, back)))
    return tuple(out)


def elementary_codegeneracies(a: ThetaObject) -> list:
    return [sigma for sigma, _ in codegeneracies_with_sections(a)]


@lru_cache(maxsize=None)
def factor_epi_mono(f: ThetaMorphism) -> tuple:
    """Return ``(epi, mono)`` with ``compose(mono, epi) is f``.

    ``epi`` is a composite of elementary codegeneracies and ``mono`` admits no
    further factorisation through one.
    """
    epi = identity(f.source)
    g = f
    while True:
        for sigma, s in codegeneracies_with_sections(g.source):
            h = compose(g, s)
            if compose(h, sigma) is g:
                epi = compose(sigma, epi)
                g = h
                break
        else:
            return epi, g


def _compositions(level: int, budget: int, count: int):
    """Tuples of ``count`` objects of ``level`` with total degree <= budget."""
    if count == 0:
        yield ()
        return
    for head in objects_up_to(level, budget):
        for tail in _compositions(level, budget - head.degree, count - 1):
            yield (head,) + tail


@lru_cache(maxsize=None)
def objects_up_to(level: int, max_degree: int) -> tuple:
    """All objects of ``Theta_level`` with degree at most ``max_degree``."""
    if max_degree < 0:
        return ()
    if level == 0:
        return (terminal(0),)
    out = []
    for m in range(max_degree + 1):
        for kids in _compositions(level - 1, max_degree - m, m):
            out.append(ThetaObject(level, kids))
    out.sort(key=lambda x: (x.degree, x.key))
    return tuple(out)


@lru_cache(maxsize=None)
def monos_into(a: ThetaObject) -> tuple:
    """All non-identity monomorphisms with target ``a``."""
    ident = identity(a)
    out = []
    for b in objects_up_to(a.level, a.degree):
        for f in hom_enumerate(b, a):
            if f is not ident and is_mono(f):
                out.append(f)
    return tuple(out)


@lru_cache(maxsize=None)
def elementary_faces(a: ThetaObject) -> tuple:
    """Non-identity monos into ``a`` that are not composites of two such."""
    monos = monos_into(a)
    composite = set()
    for v in monos:
        for w in monos_into(v.source):
            composite.add(compose(v, w))
    return tuple(u for u in monos if u not in composite)


# --- text and JSON encodings -------------------------------------------------

def object_to_json(a: ThetaObject):
    if a.level == 0:
        return "*"
    return [object_to_json(c) for c in a.children]


def object_from_json(data, level: int) -> ThetaObject:
    if level == 0:
        if data != "*":
            raise ValueError(f"level-0 object must be '*', got {data!r}")
        return terminal(0)
    if not isinstance(data, list):
        raise ValueError(f"level-{level} object must be a list, got {data!r}")
    return ThetaObject(level, [object_from_json(c, level - 1) for c in data])


_BRACKET = re.compile(r"\s*\[(\d+)\]")


def _parse_bracket(text: str, pos: int, level: int):
    if level == 0:
        m = re.compile(r"\s*(\*|\[0\])").match(text, pos)
        if not m:
            raise ValueError(f"expected '*' at position {pos}")
        return terminal(0), m.end()
    m = _BRACKET.match(text, pos)
    if not m:
        raise ValueError(f"expected '[m]' at position {pos}")
    k, pos = int(m.group(1)), m.end()
    if pos < len(text) and text[pos] == "(":
        children = []
        pos += 1
        while True:
            c, pos = _parse_bracket(text, pos, level - 1)
            children.append(c)
            while pos < len(text) and text[pos] == " ":
                pos += 1
            if pos < len(text) and text[pos] == ",":
                pos += 1
                continue
            if pos < len(text) and text[pos] == ")":
                pos += 1
                break
            raise ValueError(f"expected ',' or ')' at position {pos}")
        if len(children) != k:
            raise ValueError(f"[{k}] needs {k} children, got {len(children)}")
    else:
        children = [terminal(level - 1)] * k
    return obj(level, *children), pos


def parse_object(text: str, level: int) -> ThetaObject:
    """Parse ``[m](c_1,...,c_m)`` notation or the JSON form.

    In bracket notation omitted children default to ``[0]``.
    """
    text = text.strip()
    if _BRACKET.match(text) or (level == 0 and text in ("*", "[0]")):
        a, pos = _parse_bracket(text, 0, level)
        if text[pos:].strip():
            raise ValueError(f"trailing input at position {pos}")
        return a
    cleaned = text.replace('"*"', "*").replace("*", '"*"')
    return object_from_json(json.loads(cleaned), level)


def morphism_to_json(f: ThetaMorphism):
    if f.level == 0:
        return "*"
    return {"delta": list(f.delta), "f": [[morphism_to_json(b) for b in row] for row in f.blocks]}


def morphism_from_json(data, source: ThetaObject, target: ThetaObject) -> ThetaMorphism:
    if source.level == 0:
        return ThetaMorphism(source, target)
    delta = data["delta"]
    rows = []
    for i, row in enumerate(data["f"], 1):
        lo = delta[i - 1]
        rows.append([
            morphism_from_json(b, source.children[i - 1], target.children[lo + k])
            for k, b in enumerate(row)
        ])
    return ThetaMorphism(source, target, delta, rows)


def object_to_str(a: ThetaObject) -> str:
    return json.dumps(object_to_json(a), separators=(",", ":"))


def morphism_to_str(f: ThetaMorphism) -> str:
    return json.dumps(morphism_to_json(f), separators=(",", ":"))


# --- the simplex category as Theta_1 ----------------------------------------------

@lru_cache(maxsize=None)
def simplex(m: int) -> ThetaObject:
    """``[m]`` as an object of Theta_1."""
    return ThetaObject(1, (terminal(0),) * m)


@lru_cache(maxsize=None)
def delta_map(m: int, q: int, values) -> ThetaMorphism:
    """The monotone map ``[m] -> [q]`` with the given vertex values."""
    values = tuple(values)
    pt = identity(terminal(0))
    rows = [(pt,) * (values[i] - values[i - 1]) for i in range(1, len(values))]
    return ThetaMorphism(simplex(m), simplex(q), values, rows)


def coface(m: int, i: int) -> ThetaMorphism:
    """``d^i: [m-1] -> [m]`` skipping ``i``."""
    return delta_map(m - 1, m, tuple(j if j < i else j + 1 for j in range(m)))


def codegeneracy(m: int, i: int) -> ThetaMorphism:
    """``s^i: [m+1] -> [m]`` hitting ``i`` twice."""
    return delta_map(m + 1, m, tuple(j if j <= i else j - 1 for j in range(m + 2)))
