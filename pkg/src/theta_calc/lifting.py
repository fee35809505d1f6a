"""Generating map families and exhaustive lifting checks.

Inner sites for Theta_n-spaces are ``Site((1, n))`` (space factor first), so
outer-simplicial diagrams of them live on ``Site((1, 1, n))``.  The n = 1
acyclic cofibrations are maps of simplicial spaces on ``Site((1, 1))`` with the
horn in the space factor and the transposed objects in the categorical one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import theta as th
from .presheaf import (
    Coproduct, Empty, Extend, Presented, Presheaf, PresheafMap, Product, Pushout, Representable,
    Pullback, Sub, SubGenerated, Terminal, boundary, elem_key, hom_set, is_mono_map, segal_core,
)
from .reedy import SegalPreObject, level, outer_site
from .segal import reduce_map
from .site import DELTA, Site

__all__ = [
    "MapFamilySpec",
    "FamilyMember",
    "delta_p_marked",
    "boundary_marked",
    "spine_marked",
    "horn",
    "spine",
    "ENerve",
    "extend_map",
    "pushout_product",
    "Bracket",
    "a_bracket",
    "a_bracket_marked",
    "bracket_map",
    "theta_sp_generators",
    "reedy_generator",
    "reduced_reedy_generator",
    "family_If",
    "family_Ic",
    "family_IOf",
    "family_IOc",
    "family_Se",
    "family_phi",
    "css_acyclic_family",
    "enumerate_family",
    "RLPVerdict",
    "has_rlp",
    "coproduct_map",
    "coproduct_fibration_check",
    "SOAResult",
    "soa_factorize",
    "mapping_object",
]


@dataclass(frozen=True)
class MapFamilySpec:
    tag: str                       # I_f | I_c | I_Of | I_Oc | Se | phi | css_acyclic
    bounds: dict = field(default_factory=dict)


@dataclass
class FamilyMember:
    params: dict
    map: PresheafMap


# --- simplices with marked vertices --------------------------------------------------

def _star_ident(inner: Site):
    return inner.identity(inner.terminal())


def delta_p_marked(p: int, vs, objects=None, inner: Site = Site((1, 1))) -> SegalPreObject:
    """``Delta[p]`` with vertices labelled ``vs`` and every label of ``objects`` adjoined."""
    vs = tuple(vs)
    if len(vs) != p + 1:
        raise ValueError(f"need {p + 1} vertex labels, got {len(vs)}")
    objects = tuple(sorted(set(objects if objects is not None else vs), key=elem_key))
    if not set(vs) <= set(objects):
        raise ValueError("vertex labels must be drawn from the object set")
    site = outer_site(inner)
    star = inner.terminal()
    ident = _star_ident(inner)
    cells = [("s", (th.simplex(p),) + star)] + [(("o", o), (th.simplex(0),) + star) for o in objects]
    pt = (th.identity(th.simplex(0)),) + ident
    glue = [(("s", (th.vertex(th.simplex(p), i),) + ident), (("o", v), pt)) for i, v in enumerate(vs)]
    D = Presented(site, cells, glue, name=f"D[{p}]{vs!r}")
    D.marked = (p, vs, objects)
    return SegalPreObject(D)


def _marked_sub(X: SegalPreObject, edges, name):
    D = X.diagram
    p, vs, objects = D.marked
    inner_id = _star_ident(Site(D.site.levels[1:]))
    star = Site(D.site.levels[1:]).terminal()
    gens = [((th.simplex(0),) + star, D.cell_element(("o", o))) for o in objects]
    for a in edges:
        gens.append(((a.source,) + star, D.canonical((a.source,) + star, ("s", (a,) + inner_id))))
    sub = SubGenerated(D, gens, name=name)
    return sub.inclusion()


def spine_marked(p: int, vs, objects=None, inner: Site = Site((1, 1))) -> PresheafMap:
    """``G(p)_x -> Delta[p]_x``: the edges ``alpha^i`` plus all object points."""
    X = delta_p_marked(p, vs, objects, inner)
    edges = [th.delta_map(1, p, (i, i + 1)) for i in range(p)]
    return _marked_sub(X, edges, name=f"G({p}){tuple(vs)!r}")


def boundary_marked(p: int, vs, objects=None, inner: Site = Site((1, 1))) -> PresheafMap:
    """``dDelta[p]_x -> Delta[p]_x``."""
    X = delta_p_marked(p, vs, objects, inner)
    faces = [th.coface(p, i) for i in range(p + 1)] if p > 0 else []
    return _marked_sub(X, faces, name=f"dD[{p}]{tuple(vs)!r}")


# --- simplicial pieces ---------------------------------------------------------------

def horn(m: int, k: int) -> PresheafMap:
    """``V[m,k] -> Delta[m]``: maps missing some vertex other than ``k``."""
    if not 0 <= k <= m or m < 1:
        raise ValueError("need m >= 1 and 0 <= k <= m")
    rep = Representable(DELTA, (th.simplex(m),))

    def pred(d, u):
        hit = set(u[0].delta)
        return any(i not in hit for i in range(m + 1) if i != k)

    return Sub(rep, pred, name=f"V[{m},{k}]").inclusion()


def spine(p: int) -> PresheafMap:
    """``G(p) -> Delta[p]`` in simplicial sets; ``G(0)`` is empty."""
    rep = Representable(DELTA, (th.simplex(p),))
    if p == 0:
        e = Empty(DELTA)
        return PresheafMap(e, rep, lambda d, x: x, name="G(0)")
    one = (th.simplex(1),)
    gens = [(one, (th.delta_map(1, p, (i, i + 1)),)) for i in range(p)]
    return SubGenerated(rep, gens, name=f"G({p})").inclusion()


class ENerve(Presheaf):
    """Nerve of the free-standing isomorphism, optionally truncated.

    ``[k] -> {0,1}^(k+1)``; with ``degree`` set only strings with at most
    ``degree + 1`` runs are kept, i.e. the subobject generated in degrees
    ``<= degree``.
    """

    def __init__(self, degree=None):
        super().__init__(DELTA, None if degree is None else (degree,))
        self.degree = degree
        self.name = "E" if degree is None else f"E<={degree}"

    def _compute(self, d):
        k = d[0].m
        out = []
        for bits in range(2 ** (k + 1)):
            s = tuple((bits >> (k - j)) & 1 for j in range(k + 1))
            runs = 1 + sum(1 for a, b in zip(s, s[1:]) if a != b)
            if self.degree is None or runs <= self.degree + 1:
                out.append(s)
        return out

    def _act(self, f, s):
        return tuple(s[v] for v in f[0].delta)


def extend_map(f: PresheafMap, site: Site, axes) -> PresheafMap:
    """Pull a map back along the projection onto ``axes``."""
    src, tgt = Extend(f.source, site, axes), Extend(f.target, site, axes)
    axes = tuple(axes)
    return PresheafMap(src, tgt, lambda d, x: f.apply(tuple(d[i] for i in axes), x), name=f.name)


def pushout_product(i: PresheafMap, j: PresheafMap) -> PresheafMap:
    """``A x D u B x C -> B x D`` for monos ``i: A -> B``, ``j: C -> D`` on one site."""
    target = Product(i.target, j.target)
    images = {}

    def image(f, d):
        k = (id(f), d)
        found = images.get(k)
        if found is None:
            found = frozenset(f.apply(d, x) for x in f.source.elements(d))
            images[k] = found
        return found

    sub = Sub(target, lambda d, x: x[0] in image(i, d) or x[1] in image(j, d),
              name=f"({i.source.name} x {j.target.name} u {i.target.name} x {j.source.name})")
    return sub.inclusion()


# --- A_[p] ----------------------------------------------------------------------------

@dataclass
class Bracket:
    pushout: Pushout
    product: Product       # A x D
    vertices: Presheaf     # sk_0 D
    inner: Presheaf        # A


def _bracket(A: Presheaf, D: Presheaf, D0: PresheafMap) -> Bracket:
    site = D.site
    axes = tuple(range(1, len(site)))
    Aext = Extend(A, site, axes)
    full = Product(Aext, D)
    part = Product(Aext, D0.source)
    incl = PresheafMap(part, full, lambda d, x: (x[0], D0.apply(d, x[1])), name="A x incl")
    proj = part.projection(1)
    po = Pushout(incl, proj, name=f"{A.name}_[{D.name}]")
    return Bracket(po, full, D0.source, A)


def _outer_simplex(p: int, inner: Site):
    site = outer_site(inner)
    D = Extend(Representable(DELTA, (th.simplex(p),)), site, (0,))
    star = inner.terminal()
    gens = [((th.simplex(0),) + star, (th.vertex(th.simplex(p), i),)) for i in range(p + 1)]
    D0 = SubGenerated(D, gens, name=f"D[{p}]_0").inclusion()
    return D, D0


_SIMPLEX_CACHE = {}


def a_bracket(A: Presheaf, p: int) -> Bracket:
    """``A_[p] = A x Delta[p] +_{A x Delta[p]_0} Delta[p]_0``."""
    k = (p, A.site)
    if k not in _SIMPLEX_CACHE:
        _SIMPLEX_CACHE[k] = _outer_simplex(p, A.site)
    D, D0 = _SIMPLEX_CACHE[k]
    return _bracket(A, D, D0)


def a_bracket_marked(A: Presheaf, p: int, vs, objects=None) -> Bracket:
    """``A_[p],x`` using the vertices and object points of ``Delta[p]_x``."""
    X = delta_p_marked(p, vs, objects, A.site)
    D = X.diagram
    p_, vs_, objs = D.marked
    star = A.site.terminal()
    gens = [((th.simplex(0),) + star, D.cell_element(("o", o))) for o in objs]
    D0 = SubGenerated(D, gens, name="D_0").inclusion()
    return _bracket(A, D, D0)


def bracket_map(i: PresheafMap, a: Bracket, b: Bracket) -> PresheafMap:
    """``A_[p] -> B_[p]`` induced by ``i: A -> B`` (brackets built over the same simplex)."""
    inl, inr = b.pushout.inl(), b.pushout.inr()
    left = PresheafMap(a.product, b.pushout,
                       lambda d, x: inl.apply(d, (i.apply(d[1:], x[0]), x[1])), name="i x D")
    right = PresheafMap(a.vertices, b.pushout, lambda d, v: inr.apply(d, v), name="D_0")
    return a.pushout.induced(left, right)


# --- generating cofibrations ------------------------------------------------------------

def theta_sp_generators(m_max: int, q_max: int, n: int = 1) -> list:
    """``dDelta[m] x Theta[c] u Delta[m] x dTheta[c] -> Delta[m] x Theta[c]`` on ``Site((1, n))``."""
    inner = Site((1, n))
    out = []
    for m in range(m_max + 1):
        bm = extend_map(boundary(DELTA, (th.simplex(m),)), inner, (0,))
        for c in th.objects_up_to(n, q_max):
            bc = extend_map(boundary(Site((n,)), (c,)), inner, (1,))
            out.append(FamilyMember({"m": m, "c": th.object_to_json(c)}, pushout_product(bm, bc)))
    return out


def _empty_zero(inner: Site) -> PresheafMap:
    site = outer_site(inner)
    star = (th.simplex(0),) + inner.terminal()
    target = Representable(site, star)
    return PresheafMap(Empty(site), target, lambda d, x: x, name="0_[0] -> D[0]_[0]")


def family_If(m_max: int = 1, q_max: int = 1, p_max: int = 1, n: int = 1) -> list:
    out = []
    for gen in theta_sp_generators(m_max, q_max, n):
        i = gen.map
        for p in range(p_max + 1):
            params = dict(gen.params, p=p)
            if p == 0 and gen.params["m"] == 0 and _is_point(gen.params["c"]):
                # the pushout over an empty vertex set, so that lifting detects points
                out.append(FamilyMember(params, _empty_zero(i.source.site)))
                continue
            a, b = a_bracket(i.source, p), a_bracket(i.target, p)
            out.append(FamilyMember(params, bracket_map(i, a, b)))
    return out


def _is_point(c_json) -> bool:
    return c_json == "*" or c_json == []


def reedy_generator(i: PresheafMap, p: int) -> PresheafMap:
    """``A x Delta[p] u B x dDelta[p] -> B x Delta[p]`` on the outer site."""
    inner = i.source.site
    site = outer_site(inner)
    j = extend_map(boundary(DELTA, (th.simplex(p),)), site, (0,))
    ii = extend_map(i, site, tuple(range(1, len(site))))
    return pushout_product(ii, j)


def reduced_reedy_generator(i: PresheafMap, p: int) -> PresheafMap:
    g = reedy_generator(i, p)
    return reduce_map(g)


def family_Ic(m_max: int = 1, q_max: int = 1, p_max: int = 1, n: int = 1, check=True) -> list:
    """Reduced Reedy generators with ``m = q = p = 0`` or ``p >= 1``; each verified mono."""
    out = []
    for gen in theta_sp_generators(m_max, q_max, n):
        m, c = gen.params["m"], gen.params["c"]
        for p in range(p_max + 1):
            if p == 0 and not (m == 0 and _is_point(c)):
                continue
            r = reduced_reedy_generator(gen.map, p)
            if check and not is_mono_map(r):
                raise AssertionError(f"reduced generator {gen.params} p={p} is not mono")
            out.append(FamilyMember(dict(gen.params, p=p), r))
    return out


def family_IOf(objects, m_max: int = 0, q_max: int = 0, p_max: int = 1, n: int = 1) -> list:
    out = []
    for gen in theta_sp_generators(m_max, q_max, n):
        i = gen.map
        for p in range(p_max + 1):
            for vs in itertools.product(objects, repeat=p + 1):
                a = a_bracket_marked(i.source, p, vs, objects)
                b = a_bracket_marked(i.target, p, vs, objects)
                out.append(FamilyMember(dict(gen.params, p=p, vs=list(vs)),
                                        bracket_map(i, a, b)))
    return out


def oc_shape(i: PresheafMap, p: int, vs, objects) -> PresheafMap:
    """``(A x Delta[p]_x u B x dDelta[p]_x)_r -> (B x Delta[p]_x)_r`` for a mono ``i: A -> B``."""
    inner = i.source.site
    site = outer_site(inner)
    j = boundary_marked(p, vs, objects, inner)
    ii = extend_map(i, site, tuple(range(1, len(site))))
    return reduce_map(pushout_product(ii, j))


def family_IOc(objects, m_max: int = 0, q_max: int = 0, p_max: int = 1, n: int = 1) -> list:
    out = []
    for gen in theta_sp_generators(m_max, q_max, n):
        for p in range(1, p_max + 1):
            for vs in itertools.product(objects, repeat=p + 1):
                out.append(FamilyMember(dict(gen.params, p=p, vs=list(vs)),
                                        oc_shape(gen.map, p, vs, objects)))
    return out


def family_Se(m_max: int = 3, q_max: int = 1, n: int = 2) -> list:
    """Segal core inclusions ``G[m](c) -> Theta[m](c)`` with inner degrees bounded."""
    out = []
    inner = th.objects_up_to(n - 1, q_max)
    for m in range(2, m_max + 1):
        for cs in itertools.product(inner, repeat=m):
            if sum(c.degree for c in cs) <= q_max:
                out.append(FamilyMember({"m": m, "cs": [th.object_to_json(c) for c in cs]},
                                        segal_core(m, cs)))
    return out


def family_phi(objects, p_max: int = 2, inner: Site = Site((1, 1))) -> list:
    out = []
    for p in range(p_max + 1):
        for vs in itertools.product(objects, repeat=p + 1):
            out.append(FamilyMember({"p": p, "vs": list(vs)}, spine_marked(p, vs, objects, inner)))
    return out


CSS_SITE = Site((1, 1))


def css_acyclic_family(m_max: int = 3, p_max: int = 2, e_degree: int = 4) -> list:
    """Horn-by-spine and horn-by-E pushout-products on simplicial spaces."""
    out = []
    for m in range(1, m_max + 1):
        for k in range(m + 1):
            h = extend_map(horn(m, k), CSS_SITE, (0,))
            for p in range(p_max + 1):
                g = extend_map(spine(p), CSS_SITE, (1,))
                out.append(FamilyMember({"kind": "spine", "m": m, "k": k, "p": p},
                                        pushout_product(h, g)))
            E = ENerve(e_degree)
            point = Representable(DELTA, (th.simplex(0),))
            v0 = PresheafMap(point, E, lambda d, x: (0,) * (d[0].m + 1), name="0")
            out.append(FamilyMember({"kind": "E", "m": m, "k": k, "degree": e_degree},
                                    pushout_product(h, extend_map(v0, CSS_SITE, (1,)))))
    return out


def enumerate_family(spec: MapFamilySpec) -> list:
    b = dict(spec.bounds)
    table = {
        "I_f": family_If, "I_c": family_Ic, "I_Of": family_IOf, "I_Oc": family_IOc,
        "Se": family_Se, "phi": family_phi, "css_acyclic": css_acyclic_family,
    }
    if spec.tag not in table:
        raise ValueError(f"unknown family tag {spec.tag!r}")
    return table[spec.tag](**b)


# --- lifting --------------------------------------------------------------------------

@dataclass
class RLPVerdict:
    ok: bool
    witness: dict = None
    squares: int = 0
    window: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def _compose_key(first: PresheafMap, then: PresheafMap):
    return tuple(then.apply(d, first.apply(d, x)) for d, x in first.source.generators())


def has_rlp(f: PresheafMap, i: PresheafMap) -> RLPVerdict:
    """Does every square from ``i`` to ``f`` have a diagonal filler?"""
    X, Y = f.source, f.target
    A, B = i.source, i.target
    if B.dims is None:
        raise ValueError("the cofibration's target has unbounded support; truncate it")
    lifts = set()
    for l in hom_set(B, X):
        lifts.add((_compose_key(i, l), _compose_key(l, f)))
    bottoms = {}
    for b in hom_set(B, Y):
        bottoms.setdefault(_compose_key(i, b), []).append(b)
    squares = 0
    for a in hom_set(A, X):
        fa = _compose_key(a, f)
        for b in bottoms.get(fa, ()):
            squares += 1
            if (a.key(), b.key()) not in lifts:
                return RLPVerdict(False, {"top": repr(a.key()), "bottom": repr(b.key())},
                                  squares, {"dims": list(B.dims)})
    return RLPVerdict(True, None, squares, {"dims": list(B.dims)})


def coproduct_map(f: PresheafMap, g: PresheafMap) -> PresheafMap:
    src = Coproduct(f.source, g.source)
    tgt = Coproduct(f.target, g.target)
    return PresheafMap(src, tgt, lambda d, x: (x[0], (f, g)[x[0]].apply(d, x[1])), name="f+g")


def coproduct_fibration_check(f: PresheafMap, g: PresheafMap, family) -> bool:
    h = coproduct_map(f, g)
    return all(has_rlp(h, _member_map(i)) for i in family)


def _member_map(i):
    return i.map if isinstance(i, FamilyMember) else i


def _unfilled(f: PresheafMap, i: PresheafMap) -> list:
    X, Y = f.source, f.target
    A, B = i.source, i.target
    lifts = {(_compose_key(i, l), _compose_key(l, f)) for l in hom_set(B, X)}
    bottoms = {}
    for b in hom_set(B, Y):
        bottoms.setdefault(_compose_key(i, b), []).append(b)
    out = []
    for a in hom_set(A, X):
        for b in bottoms.get(_compose_key(a, f), ()):
            if (a.key(), b.key()) not in lifts:
                out.append((a, b))
    return out


@dataclass
class SOAResult:
    cell: PresheafMap        # X -> Z
    remainder: PresheafMap   # Z -> Y
    stages_used: int
    attachments: int
    remaining: int
    ok: bool


def soa_factorize(f: PresheafMap, family, max_stages: int = 3) -> SOAResult:
    """Bounded small object argument: attach a cell for every unfilled square per stage."""
    family = [_member_map(i) for i in family]
    site = f.source.site
    cell = PresheafMap.identity(f.source)
    r = f
    attachments = 0
    for stage in range(max_stages + 1):
        squares = []
        for i in family:
            squares.extend((i, a, b) for a, b in _unfilled(r, i))
        if not squares or stage == max_stages:
            return SOAResult(cell, r, stage, attachments, len(squares), not squares)
        sources = Coproduct(*(i.source for i, _, _ in squares), site=site)
        targets = Coproduct(*(i.target for i, _, _ in squares), site=site)
        tops = [a for _, a, _ in squares]
        bots = [b for _, _, b in squares]
        incs = [i for i, _, _ in squares]
        top = PresheafMap(sources, r.source, lambda d, x, t=tops: t[x[0]].apply(d, x[1]), name="tops")
        inc = PresheafMap(sources, targets, lambda d, x, c=incs: (x[0], c[x[0]].apply(d, x[1])),
                          name="cells")
        po = Pushout(top, inc, name=f"Z{stage + 1}")
        bottom = PresheafMap(targets, r.target, lambda d, x, b=bots: b[x[0]].apply(d, x[1]),
                             name="bottoms")
        new_r = po.induced(r, bottom)
        cell = cell.then(po.inl())
        r = new_r
        attachments += len(squares)
    raise AssertionError("unreachable")


# --- mapping objects -----------------------------------------------------------------

def mapping_object(X, x0, x1, c) -> tuple:
    """``M_X(x0, x1)(c)``: the pullback of ``X_1 -> X_0 x X_0`` along the point ``(x0, x1)``."""
    D = getattr(X, "diagram", X)
    x0_level, x1_level = level(D, 0), level(D, 1)
    labels = x0_level.elements(x0_level.site.terminal())
    for v in (x0, x1):
        if v not in labels:
            raise ValueError(f"{v!r} is not a vertex")
    pair = Product(x0_level, x0_level)
    ends = PresheafMap(x1_level, pair, lambda d, e: tuple(
        D.act((th.coface(1, 1 - j),) + tuple(th.identity(o) for o in d), e) for j in (0, 1)),
        name="(d1, d0)")
    point = Terminal(x0_level.site)
    pick = PresheafMap(point, pair, lambda d, _: tuple(
        x0_level.act(x0_level.site.to_terminal(d), v) for v in (x0, x1)), name="(x0, x1)")
    return tuple(e for e, _ in Pullback(ends, pick).elements(tuple(c)))
