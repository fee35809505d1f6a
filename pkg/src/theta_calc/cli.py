"""``theta-calc``: command-line access to the engine.

Exit codes: 0 success, 1 a checked property failed, 2 malformed input.
Reports are JSON with sorted keys and always embed the window and bounds.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

from . import theta as th
from .presheaf import (
    Presented, Representable, Terminal, Empty, SubGenerated, hom_set, is_iso_map, is_mono_map,
    presentation_from_json, presentation_to_json, site_object_from_json, site_object_to_json,
    tabulate, tabulated_to_json,
)
from .site import Site, Window, WindowError

__all__ = ["RunConfig", "run", "main"]


class InputError(ValueError):
    """Malformed command-line input (exit code 2)."""


@dataclass
class RunConfig:
    n: int = 1
    degree: int = 2
    seed: int = 0
    count: int = 10
    bounds: dict = field(default_factory=dict)
    output: str = "json"

    def __post_init__(self):
        if self.n < 0 or self.degree < 0 or self.count < 0:
            raise InputError("bounds must be non-negative")
        if self.output not in ("json", "csv", "text"):
            raise InputError(f"unknown output format {self.output!r}")


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("THETA_CALC_THREADS", "1")))
    except ValueError:
        raise InputError("THETA_CALC_THREADS must be an integer")


def _load_json(text: str):
    if text is None:
        raise InputError("missing JSON input")
    if os.path.exists(text):
        with open(text) as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from None


def _parse_object(text: str, n: int):
    try:
        return th.parse_object(text, n)
    except (ValueError, TypeError, json.JSONDecodeError) as exc:
        raise InputError(f"malformed object {text!r}: {exc}") from None


def _presentation(text) -> Presented:
    data = _load_json(text)
    try:
        return presentation_from_json(data)
    except (KeyError, ValueError, TypeError) as exc:
        raise InputError(f"malformed presentation: {exc}") from None


def _config_json(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    d.pop("output")
    return d


# --- subcommands ---------------------------------------------------------------------

def _diagram(text):
    X = _presentation(text)
    if len(X.site) < 2:
        raise InputError("a diagram needs an outer factor and an inner site")
    return X


def cmd_hom(args, cfg):
    a, b = _parse_object(args.src, cfg.n), _parse_object(args.dst, cfg.n)
    maps = th.hom_enumerate(a, b)
    report = {"n": cfg.n, "src": th.object_to_json(a), "dst": th.object_to_json(b), "count": len(maps)}
    if args.list:
        report["morphisms"] = [th.morphism_to_json(f) for f in maps]
    return report, 0, str(len(maps))


def cmd_eval(args, cfg):
    P = _presentation(args.presentation)
    dims = tuple(args.window) if args.window else P.dims
    if dims is None or len(dims) != len(P.site):
        raise InputError("window dims must give one bound per site factor")
    window = Window.bounded(P.site, dims)
    if args.at:
        try:
            d = site_object_from_json(_load_json(args.at), P.site)
        except (ValueError, TypeError) as exc:
            raise InputError(f"malformed site object: {exc}") from None
        objs = [d]
    else:
        objs = list(window)
    rows = [{"object": site_object_to_json(d), "size": P.size(d)} for d in objs]
    report = {"site": list(P.site.levels), "window": list(dims), "values": rows}
    if args.tabulate:
        report["tabulated"] = tabulated_to_json(tabulate(P, window), window)
    return report, 0, rows


def _ua_instance(spec: str, n: int):
    from .enriched import UA

    site = Site((n,))
    if spec == "point":
        A = Terminal(site)
    elif spec == "empty":
        A = Empty(site)
    elif spec.startswith("rep:"):
        A = Representable(site, (_parse_object(spec[4:], n),))
    else:
        raise InputError(f"unknown UA argument {spec!r} (point, empty or rep:<object>)")
    return UA(A)


def cmd_segal_check(args, cfg):
    from .enriched import nerve
    from .segal import is_segal_strict
    from .reedy import is_discrete0
    from .segal import reduction

    if args.presentation:
        X = _diagram(args.presentation)
        if not is_discrete0(X):
            X = reduction(X).diagram
        source = "presentation"
    else:
        X = nerve(_ua_instance(args.ua, cfg.n)).diagram
        source = f"nerve(U({args.ua}))"
    verdict = is_segal_strict(X, max_k=args.max_k)
    report = {"input": source, "strict": verdict.ok, "witness": verdict.witness, "window": verdict.window}
    return report, 0 if verdict.ok else 1, "pass" if verdict.ok else "fail"


def cmd_latch_check(args, cfg):
    from .reedy import latching_report

    Y = _diagram(args.presentation)
    if args.sub is None:
        gens = [(shape, Y.cell_element(cid)) for cid, shape in Y.cells]
    else:
        ids = set(args.sub)
        unknown = ids - {cid for cid, _ in Y.cells}
        if unknown:
            raise InputError(f"unknown cell ids {sorted(unknown)}")
        gens = [(shape, Y.cell_element(cid)) for cid, shape in Y.cells if cid in ids]
    f = SubGenerated(Y, gens, name="sub").inclusion()
    report = latching_report(f)
    ok = all(level["latching_mono"] for level in report["levels"])
    return report, 0 if ok else 1, "pass" if ok else "fail"


def _lift_case(seed: int, bounds: dict):
    from .lifting import CSS_SITE, has_rlp
    from .random_instances import random_discrete_space, random_map

    rng = random.Random(seed)
    family = _css_family(bounds)
    X = random_discrete_space(rng, CSS_SITE)
    Y = random_discrete_space(rng, CSS_SITE)
    f = random_map(rng, X, Y)
    if f is None:
        return {"seed": seed, "skipped": True}
    failures = []
    for member in family:
        v = has_rlp(f, member.map)
        if not v:
            failures.append({"member": member.params, "witness": v.witness})
    return {"seed": seed, "members": len(family), "failures": failures,
            "instance": {"X": presentation_to_json(X.inner), "Y": presentation_to_json(Y.inner),
                         "f": repr(f.key())}}


_FAMILY_CACHE = {}


def _css_family(bounds):
    from .lifting import css_acyclic_family

    key = (bounds["m_max"], bounds["p_max"], bounds["e_degree"])
    if key not in _FAMILY_CACHE:
        _FAMILY_CACHE[key] = css_acyclic_family(*key)
    return _FAMILY_CACHE[key]


def cmd_lift(args, cfg):
    if args.suite == "discrete-fibration":
        if cfg.n != 1:
            raise InputError("the discrete-fibration suite is defined for n = 1 only")
        bounds = {"m_max": args.m_max, "p_max": args.p_max, "e_degree": args.e_degree}
        cfg.bounds = bounds
        seeds = [cfg.seed * 100003 + i for i in range(cfg.count)]
        cases = _parallel(lambda s: _lift_case(s, bounds), seeds)
        failed = [c for c in cases if c.get("failures")]
        report = {"suite": args.suite, "bounds": bounds, "window": {"E_degree": args.e_degree},
                  "cases": len(cases), "failed": len(failed), "failures": failed[:5]}
        return report, 1 if failed else 0, "pass" if not failed else "fail"
    if args.suite == "surjectivity":
        cases = _parallel(_surjectivity_case, [cfg.seed * 100003 + i for i in range(cfg.count)])
        bad = [c for c in cases if c["rlp"] != c["surjective"]]
        report = {"suite": args.suite, "cases": len(cases), "mismatches": bad[:5],
                  "window": {"inner_site": [1]}}
        return report, 1 if bad else 0, "pass" if not bad else "fail"
    raise InputError(f"unknown suite {args.suite!r}")


def _surjectivity_case(seed):
    from .lifting import _empty_zero, has_rlp
    from .random_instances import random_map, random_segal_precategory

    rng = random.Random(seed)
    inner = Site((1,))
    X = random_segal_precategory(rng, inner)
    Y = random_segal_precategory(rng, inner)
    f = random_map(rng, X, Y)
    if f is None:
        return {"seed": seed, "rlp": True, "surjective": True, "skipped": True}
    star = (th.simplex(0), th.terminal(1))
    image = {f.apply(star, x) for x in X.elements(star)}
    surjective = image == set(Y.elements(star))
    rlp = has_rlp(f, _empty_zero(inner)).ok
    return {"seed": seed, "rlp": rlp, "surjective": surjective}


def cmd_reduce(args, cfg):
    from .reedy import level
    from .segal import reduction

    if args.example == "counterexample":
        from .lifting import reduced_reedy_generator, theta_sp_generators

        gen = [g for g in theta_sp_generators(1, 0, 1) if g.params["m"] == 1][0]
        r = reduced_reedy_generator(gen.map, 0)
        star = r.source.site.terminal()
        report = {"example": "p=q=0, m=1", "source_points": r.source.size(star),
                  "target_points": r.target.size(star), "mono": is_mono_map(r)}
        # the expected outcome is a non-mono map, so this is not a violation
        return report, 0, report
    X = _diagram(args.presentation)
    r = reduction(X)
    dims = X.dims
    window = Window.bounded(X.site, dims)
    rows = [{"object": site_object_to_json(d), "before": X.size(d), "after": r.diagram.size(d)}
            for d in window]
    x0 = level(r.diagram, 0)
    report = {"window": list(dims), "components": len(r.components), "levels": rows,
              "discrete0": x0.size(x0.site.terminal()) == len(r.components)}
    return report, 0, rows


def cmd_nerve(args, cfg):
    from .enriched import Nerve
    from .reedy import level

    C = _ua_instance(args.ua, cfg.n)
    cfg.bounds = {"max_p": args.max_p}
    N = Nerve(C)
    A = C.edges[("x", "y")]
    inner = Site((cfg.n,))
    rows = []
    ok = True
    for p in range(args.max_p + 1):
        Np = level(N, p)
        for d in inner.objects((cfg.degree,)):
            expect = 2 + p * A.size(d)
            got = Np.size(d)
            ok = ok and expect == got
            rows.append({"p": p, "theta": th.object_to_json(d[0]), "size": got, "closed_form": expect})
    report = {"ua": args.ua, "window": {"max_p": args.max_p, "degree": cfg.degree}, "rows": rows,
              "matches_closed_form": ok}
    return report, 0 if ok else 1, rows


def _roundtrip_case(seed):
    from .enriched import nerve_unit, strict_counit
    from .random_instances import random_free_category, random_strict_object

    rng = random.Random(seed)
    C = random_free_category(rng)
    F = strict_counit(C)
    window = Window.bounded(C.site, C.inner_dims())
    c_ok = F.check(window) and all(is_iso_map(F.homs[k], window) for k in F.homs)
    X, dims = random_strict_object(rng)
    R = nerve_unit(X, dims)
    outer = Window.bounded(X.site, X.dims)
    x_ok = R.check_natural(outer) and is_iso_map(R, outer)
    return {"seed": seed, "objects": len(C.objects), "C_iso": bool(c_ok), "X_iso": bool(x_ok),
            "ok": bool(c_ok and x_ok)}


def cmd_roundtrip(args, cfg):
    cases = _parallel(_roundtrip_case, [cfg.seed * 100003 + i for i in range(cfg.count)])
    bad = [c for c in cases if not c["ok"]]
    report = {"cases": len(cases), "failed": bad, "window": "hom dims of each category; outer dims of each object"}
    return report, 1 if bad else 0, "pass" if not bad else "fail"


def _fuzz_yoneda(seed):
    from .random_instances import random_presented, random_site_object

    rng = random.Random(seed)
    n = rng.choice([1, 2])
    site = Site((n,))
    X = random_presented(rng, site, 3, 2)
    a = random_site_object(rng, site, 2)
    maps = hom_set(Representable(site, a), X)
    values = [m.apply(a, site.identity(a)) for m in maps]
    ok = len(set(values)) == len(values) == X.size(a)
    return {"seed": seed, "ok": ok, "instance": presentation_to_json(X), "a": site_object_to_json(a)}


def _fuzz_latching(seed):
    from .random_instances import random_presented, random_sub_inclusion
    from .reedy import latching_report

    rng = random.Random(seed)
    inner = rng.choice([Site((1,)), Site((2,)), Site((1, 1))])
    Y = random_presented(rng, Site((1,) + inner.levels), 6, 3, name="Y")
    f = random_sub_inclusion(rng, Y)
    report = latching_report(f)
    ok = all(lv["latching_mono"] for lv in report["levels"])
    return {"seed": seed, "ok": ok, "instance": presentation_to_json(Y)}


def _fuzz_degeneracy(seed):
    from .random_instances import random_presented
    from .reedy import inner_window, nondegenerate

    rng = random.Random(seed)
    inner = rng.choice([Site((1,)), Site((2,))])
    X = random_presented(rng, Site((1,) + inner.levels), 3, 3, name="X")
    ok = True
    for m in range(X.dims[0] + 2):
        for d in inner_window(X):
            ok = ok and nondegenerate(X, m, d).agree
    return {"seed": seed, "ok": ok, "instance": presentation_to_json(X)}


FUZZ = {"yoneda": _fuzz_yoneda, "latching": _fuzz_latching, "degeneracy": _fuzz_degeneracy}


def cmd_fuzz(args, cfg):
    suites = sorted(FUZZ) if args.suite == "all" else [args.suite]
    for s in suites:
        if s not in FUZZ:
            raise InputError(f"unknown fuzz suite {s!r}")
    out, failed = {}, 0
    for s in suites:
        cases = _parallel(FUZZ[s], [cfg.seed * 100003 + i for i in range(cfg.count)])
        bad = [c for c in cases if not c["ok"]]
        failed += len(bad)
        out[s] = {"cases": len(cases), "failures": bad[:3]}
    report = {"suites": out, "failed": failed}
    return report, 1 if failed else 0, "pass" if not failed else "fail"


def _parallel(fn, items):
    threads = _threads()
    if threads == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# --- entry point -------------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="theta-calc", description="Computations with Theta_n presheaves.")
    p.add_argument("--format", dest="output", default=None, choices=["json", "csv", "text"])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--n", type=int, default=1, help="level of Theta_n")
        sp.add_argument("--degree", type=int, default=2, help="degree bound for probe windows")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--count", type=int, default=10)
        sp.add_argument("--format", dest="output", default=argparse.SUPPRESS,
                        choices=["json", "csv", "text"])
        return sp

    sp = common(sub.add_parser("hom", help="count morphisms between Theta_n objects"))
    sp.add_argument("--src", required=True)
    sp.add_argument("--dst", required=True)
    sp.add_argument("--list", action="store_true")
    sp.set_defaults(fn=cmd_hom)

    sp = common(sub.add_parser("eval", help="evaluate a presented presheaf on a window"))
    sp.add_argument("--presentation", required=True, help="JSON text or file")
    sp.add_argument("--window", type=int, nargs="+")
    sp.add_argument("--at", help="a single site object as JSON")
    sp.add_argument("--tabulate", action="store_true")
    sp.set_defaults(fn=cmd_eval)

    sp = common(sub.add_parser("segal-check", help="strict Segal condition"))
    sp.add_argument("--ua", default="point")
    sp.add_argument("--presentation")
    sp.add_argument("--max-k", type=int, default=3)
    sp.set_defaults(fn=cmd_segal_check)

    sp = common(sub.add_parser("latch-check", help="relative latching maps of a subdiagram"))
    sp.add_argument("--presentation", required=True)
    sp.add_argument("--sub", nargs="*", help="cell ids generating the subdiagram")
    sp.set_defaults(fn=cmd_latch_check)

    sp = common(sub.add_parser("lift", help="lifting-property suites"))
    sp.add_argument("--suite", default="discrete-fibration", choices=["discrete-fibration", "surjectivity"])
    sp.add_argument("--m-max", type=int, default=3)
    sp.add_argument("--p-max", type=int, default=2)
    sp.add_argument("--e-degree", type=int, default=4)
    sp.set_defaults(fn=cmd_lift)

    sp = common(sub.add_parser("reduce", help="reduction of an outer-simplicial diagram"))
    sp.add_argument("--presentation")
    sp.add_argument("--example", choices=["counterexample"])
    sp.set_defaults(fn=cmd_reduce)

    sp = common(sub.add_parser("nerve", help="level counts of nerve(UA)"))
    sp.add_argument("--ua", default="point")
    sp.add_argument("--max-p", type=int, default=3)
    sp.set_defaults(fn=cmd_nerve)

    sp = common(sub.add_parser("roundtrip", help="strictify(nerve(C)) against C"))
    sp.set_defaults(fn=cmd_roundtrip)

    sp = common(sub.add_parser("fuzz", help="randomized property suites"))
    sp.add_argument("--suite", default="all")
    sp.set_defaults(fn=cmd_fuzz)
    return p


def _render(report, table, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2, default=repr)
    if fmt == "csv" and isinstance(table, list) and table and isinstance(table[0], dict):
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(table[0]), lineterminator="\n")
        writer.writeheader()
        for row in table:
            writer.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in row.items()})
        return buf.getvalue().rstrip("\n")
    if isinstance(table, str):
        return table
    return json.dumps(table, sort_keys=True, default=repr)


def run(argv) -> tuple:
    """Run a command; return ``(exit_code, output_text)``."""
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (2 if exc.code else 0), ""
    try:
        # hom is a counting query; everything else reports JSON by default
        fmt = args.output or ("text" if args.command == "hom" else "json")
        cfg = RunConfig(n=args.n, degree=args.degree, seed=args.seed, count=args.count, output=fmt)
        report, code, table = args.fn(args, cfg)
    except (InputError, WindowError) as exc:
        return 2, json.dumps({"error": str(exc)}, sort_keys=True)
    if isinstance(report, dict):
        report = dict(report, command=args.command, config=_config_json(cfg))
    return code, _render(report, table, cfg.output)


def main(argv=None) -> int:
    code, text = run(sys.argv[1:] if argv is None else argv)
    if text:
        stream = sys.stderr if code == 2 else sys.stdout
        print(text, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
