"""Command-line front end: every subcommand writes one deterministic JSON report.

Exit codes: 0 success, 1 invalid input (validation, malformed JSON, bad flags),
2 failed precondition (density bound, gadget cap).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

import tomli

from . import __version__
from .calculus import (
    DensityPreconditionError,
    classical_variation_interval,
    coarea_sweep,
    perimeter_upper_bound,
    smooth_jumps,
    tv_bracket,
)
from .diagnostics import (
    PoincareParams,
    default_radii,
    density_liminf,
    doubling_scan,
    federer_report,
    gallery_federer_report,
    poincare_check,
    poincare_sample,
    sample_balls,
    sample_points,
)
from .gallery import indicator_E, parse_gallery, star_doubling_grid, star_h1_closed_form, star_space
from .graph import (
    EdgeSubset,
    InputError,
    MetricGraph,
    PiecewiseLinearFn,
    PointRef,
    constant_function,
    function_to_json,
    indicator_function,
    load_function,
    load_space,
    load_subset,
    parse_point,
    space_to_json,
    subset_to_json,
    validate_function,
    validate_graph,
)
from .measure import BallSpec, ball_measure, dyadic_radii, h1_of_subset, h1_total
from .numeric import Number, parse_number, to_json_number
from .variation import CapExceeded, build_gadget, good_representative, parse_mode, variation_solve, var_total

EXIT_OK, EXIT_INPUT, EXIT_PRECONDITION = 0, 1, 2

COMMANDS = (
    "validate", "gallery", "measure", "density", "doubling", "poincare",
    "variation", "coarea", "perimeter", "bracket", "federer",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # exit 1 instead of argparse's 2
        raise UsageError(message)


def _number(text: str) -> Number:
    try:
        return parse_number(str(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _radii(text: str) -> tuple[Number, int]:
    r0, sep, halvings = str(text).partition(":")
    if not sep:
        raise argparse.ArgumentTypeError("expected r0:halvings")
    try:
        r = parse_number(r0)
        n = int(halvings)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad radius grid {text!r}") from exc
    if not r > 0 or n < 0:
        raise argparse.ArgumentTypeError("radius grid needs r0 > 0 and halvings >= 0")
    return r, n


def _point(text: str) -> PointRef:
    try:
        return parse_point(str(text))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--space", help="metric graph JSON file")
    common.add_argument("--fn", help="piecewise-linear function JSON file")
    common.add_argument("--set", dest="set_path", help="edge subset JSON file")
    common.add_argument("--gallery", help="built-in space, e.g. star:J=3,metric=geodesic")
    common.add_argument("--mode", default="pv", help="pv | PV | iv")
    common.add_argument("--c0", type=_number, action="append", help="density bound (repeatable in federer)")
    common.add_argument("--p", type=_number, default=Fraction(1))
    common.add_argument("--C", type=_number, default=Fraction(4))
    common.add_argument("--lambda", dest="lam", type=_number, default=Fraction(3))
    common.add_argument("--radii", type=_radii, help="r0:halvings")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="report path (default stdout)")
    common.add_argument("--csv", help="CSV path for (r, ratio) profiles")
    common.add_argument("--cap-segments", dest="cap_segments", type=int)
    common.add_argument("--center", type=_point, help="point as v:ID or e:ID:t")
    common.add_argument("--r", type=_number, help="ball radius")
    common.add_argument("--eps", type=_number, default=Fraction(1, 10), help="smoothing tolerance")
    common.add_argument("--balls", type=int, default=20, help="Poincaré balls to sample")
    common.add_argument("--per-ball", dest="per_ball", type=int, default=64, help="test functions per ball")
    common.add_argument("--method", default="centered", help="codimension-one content: centered | cover")
    common.add_argument("--config", help="TOML file of defaults; flags override it")
    parser = _Parser(prog="bvgraph", description="Variation and measure diagnostics on metric graphs.")
    parser.add_argument("--version", action="version", version=f"bvgraph {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


CONFIG_KEYS = {
    "space", "fn", "set", "gallery", "mode", "c0", "p", "C", "lambda", "radii", "seed", "out", "csv",
    "cap-segments", "center", "r", "eps", "balls", "per-ball", "method",
}
CONFIG_DEST = {"set": "set_path", "lambda": "lam", "cap-segments": "cap_segments", "per-ball": "per_ball"}


def _config_defaults(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            raw = tomli.load(fh)
    except tomli.TOMLDecodeError as exc:
        raise InputError(f"malformed TOML: {exc}", path) from exc
    except OSError as exc:
        raise InputError(f"cannot read config: {exc}", path) from exc
    unknown = sorted(set(raw) - CONFIG_KEYS)
    if unknown:
        raise UsageError(f"unknown config keys {unknown}")
    out = {}
    for key, value in raw.items():
        dest = CONFIG_DEST.get(key, key)
        if key in ("c0",):
            value = [_number(v) for v in (value if isinstance(value, list) else [value])]
        elif key in ("p", "C", "lambda", "r", "eps"):
            value = _number(value)
        elif key == "radii":
            value = _radii(value)
        elif key == "center":
            value = _point(value)
        out[dest] = value
    return out


def parse_args(argv: Sequence[str]) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        defaults = _config_defaults(args.config)
        sub = parser._subparsers._group_actions[0].choices[args.command]
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


# ---------------------------------------------------------------------------
# inputs


class Inputs:
    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.gallery = parse_gallery(args.gallery) if args.gallery else None
        if self.gallery is not None:
            self.graph = star_space(self.gallery)
        elif args.space:
            self.graph = load_space(args.space)
        else:
            raise UsageError("need --space or --gallery")
        self._checked = False

    def checked_graph(self) -> MetricGraph:
        if not self._checked:
            rep = validate_graph(self.graph)
            if not rep.ok:
                raise InputError(f"invalid space: {rep.error}", rep.detail or "")
            self._checked = True
        return self.graph

    def subset(self) -> EdgeSubset:
        if self.args.set_path:
            s = load_subset(self.args.set_path)
            s.validate(self.checked_graph())
            return s
        if self.gallery is not None:
            return indicator_E(self.gallery)
        raise UsageError("need --set (or --gallery for the distinguished set)")

    def function(self, required: bool = True) -> Optional[PiecewiseLinearFn]:
        g = self.checked_graph()
        if self.args.fn:
            f = load_function(self.args.fn)
            try:
                validate_function(g, f)
            except ValueError as exc:
                raise InputError(f"invalid function: {exc}") from exc
            return f
        if self.args.set_path or self.gallery is not None:
            return indicator_function(g, self.subset())
        if required:
            raise UsageError("need --fn")
        return None

    def radii(self, fallback: Sequence[Number]) -> tuple[Number, ...]:
        if self.args.radii is not None:
            return dyadic_radii(*self.args.radii)
        return tuple(fallback)


def _nums(values) -> list:
    return [to_json_number(v) for v in values]


# ---------------------------------------------------------------------------
# commands


def cmd_validate(inp: Inputs) -> tuple[dict, int]:
    rep = validate_graph(inp.graph)
    result = {"space": rep.to_json()}
    code = EXIT_OK if rep.ok else EXIT_INPUT
    if rep.ok and inp.args.fn:
        try:
            validate_function(inp.graph, load_function(inp.args.fn))
            result["fn"] = {"ok": True}
        except InputError:
            raise
        except ValueError as exc:
            result["fn"] = {"ok": False, "error": str(exc)}
            code = EXIT_INPUT
    if rep.ok and inp.args.set_path:
        try:
            load_subset(inp.args.set_path).validate(inp.graph)
            result["set"] = {"ok": True}
        except InputError:
            raise
        except ValueError as exc:
            result["set"] = {"ok": False, "error": str(exc)}
            code = EXIT_INPUT
    return result, code


def cmd_gallery(inp: Inputs) -> tuple[dict, int]:
    if inp.gallery is None:
        raise UsageError("gallery needs --gallery")
    g = inp.checked_graph()
    return {
        "spec": {"depth": inp.gallery.depth, "metric": inp.gallery.metric},
        "space": space_to_json(g),
        "E": subset_to_json(indicator_E(inp.gallery)),
        "h1_total": to_json_number(h1_total(g)),
        "h1_closed_form": to_json_number(star_h1_closed_form(inp.gallery.depth)),
    }, EXIT_OK


def cmd_measure(inp: Inputs) -> tuple[dict, int]:
    g = inp.checked_graph()
    a = inp.args
    out = {"h1_total": to_json_number(h1_total(g))}
    if a.set_path or inp.gallery is not None:
        out["h1_set"] = to_json_number(h1_of_subset(g, inp.subset()))
    if a.center is not None:
        g.check_point(a.center)
        if a.r is None:
            raise UsageError("--center needs --r")
        out["ball"] = {"center": a.center.to_json(), "r": to_json_number(a.r), "h1": to_json_number(ball_measure(g, a.center, a.r))}
    return out, EXIT_OK


def _write_csv(path: Optional[str], header: Sequence[str], rows) -> None:
    if not path:
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def cmd_density(inp: Inputs) -> tuple[dict, int]:
    g = inp.checked_graph()
    x = inp.args.center or PointRef(vertex=g.vertices[0].id)
    g.check_point(x)
    radii = inp.radii(default_radii(g, constant_function(g, Fraction(0)), x))
    prof = density_liminf(g, x, radii)
    _write_csv(inp.args.csv, ("r", "ratio"), prof.csv_rows())
    return {"profile": prof.to_json()}, EXIT_OK


def cmd_doubling(inp: Inputs) -> tuple[dict, int]:
    g = inp.checked_graph()
    if inp.gallery is not None:
        centers, radii = star_doubling_grid(inp.gallery.depth, inp.args.seed)
    else:
        centers = [PointRef(vertex=v.id) for v in g.vertices] + sample_points(g, 16, inp.args.seed)
        longest = max(e.length for e in g.edges)
        radii = dyadic_radii(longest / 2, 10)
    radii = inp.radii(radii)
    rep = doubling_scan(g, centers, radii, exact=len(g.edges) <= 128)
    return {"doubling": rep.to_json(), "centers": len(centers)}, EXIT_OK


def _params(inp: Inputs) -> PoincareParams:
    try:
        return PoincareParams(inp.args.p, inp.args.C, inp.args.lam)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_poincare(inp: Inputs) -> tuple[dict, int]:
    g = inp.checked_graph()
    params = _params(inp)
    a = inp.args
    if a.fn:
        if a.center is None or a.r is None:
            raise UsageError("a single check needs --center and --r")
        g.check_point(a.center)
        res = poincare_check(g, BallSpec(a.center, a.r), inp.function(), params)
        return {"check": res.to_json(), "params": params.to_json()}, EXIT_OK
    balls = sample_balls(g, a.balls, a.seed, a.center)
    rep = poincare_sample(g, balls, params, a.seed, a.per_ball)
    return {"sample": rep.to_json(), "balls": [{"center": b.center.to_json(), "r": to_json_number(b.radius)} for b in balls]}, EXIT_OK


def cmd_variation(inp: Inputs) -> tuple[dict, int]:
    g = inp.checked_graph()
    f = inp.function()
    mode = parse_mode(inp.args.mode)
    gad = build_gadget(g, f)
    system = variation_solve(gad, mode, cap_segments=inp.args.cap_segments)
    out = {"mode": mode, "total": to_json_number(system.total), "system": system.to_json(gad)}
    out["var_total"] = to_json_number(var_total(g, f, cap_segments=inp.args.cap_segments))
    return out, EXIT_OK


def cmd_coarea(inp: Inputs) -> tuple[dict, int]:
    g = inp.checked_graph()
    f = inp.function()
    sweep = coarea_sweep(g, f, cap_segments=inp.args.cap_segments)
    out = {"coarea": sweep.to_json()}
    try:
        out["classical_variation"] = to_json_number(classical_variation_interval(g, f))
    except ValueError:
        out["classical_variation"] = None
    return out, EXIT_OK


def cmd_perimeter(inp: Inputs) -> tuple[dict, int]:
    g = inp.checked_graph()
    if not inp.args.c0:
        raise UsageError("perimeter needs --c0")
    c0 = inp.args.c0[0]
    if inp.args.fn:
        sm = smooth_jumps(g, inp.function(), inp.args.eps, c0, cap_segments=inp.args.cap_segments)
        return {"smoothing": sm.to_json(), "fn": function_to_json(sm.fn), "c0": to_json_number(c0)}, EXIT_OK
    bound = perimeter_upper_bound(g, inp.subset(), c0)
    return {"perimeter": bound.to_json()}, EXIT_OK


def cmd_bracket(inp: Inputs) -> tuple[dict, int]:
    g = inp.checked_graph()
    f = inp.function()
    rep = good_representative(g, f)
    br = tv_bracket(g, f, cap_segments=inp.args.cap_segments)
    return {"bracket": br.to_json(build_gadget(g, rep))}, EXIT_OK


def cmd_federer(inp: Inputs) -> tuple[dict, int]:
    a = inp.args
    c0s = a.c0 or []
    params = _params(inp)
    if inp.gallery is not None and not a.set_path:
        rep = gallery_federer_report(
            inp.gallery.depth, inp.gallery.metric, a.seed, c0s, params=params, cap_segments=a.cap_segments,
            content_method=a.method,
        )
    else:
        g = inp.checked_graph()
        radii = dyadic_radii(*a.radii) if a.radii else None
        rep = federer_report(
            g, inp.subset(), c0s, radii, a.seed, params, cap_segments=a.cap_segments, content_method=a.method
        )
    _write_csv(
        a.csv, ("point", "r", "ratio"),
        [(str(d.point), r, q) for d in rep.densities for r, q in d.csv_rows()],
    )
    return {"federer": rep.to_json(), "verdict": rep.summary}, EXIT_OK


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


def _envelope(args: argparse.Namespace, result: dict) -> dict:
    return {
        "tool": "bvgraph",
        "version": __version__,
        "command": args.command,
        "seed": args.seed,
        "caps": {"cap_segments": args.cap_segments},
        "radii": {"r0": to_json_number(args.radii[0]), "halvings": args.radii[1]} if args.radii else None,
        "result": result,
    }


def _emit(report: dict, path: Optional[str]) -> None:
    text = json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fail(code: int, kind: str, message: str, extra: Optional[dict] = None) -> int:
    err = {"error": kind, "message": message, **(extra or {})}
    sys.stderr.write(json.dumps(err, sort_keys=True, ensure_ascii=False) + "\n")
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
    except UsageError as exc:
        return _fail(EXIT_INPUT, "usage", str(exc))
    except InputError as exc:
        return _fail(EXIT_INPUT, "input", str(exc), {"where": exc.where})
    try:
        inp = Inputs(args)
        result, code = HANDLERS[args.command](inp)
    except UsageError as exc:
        return _fail(EXIT_INPUT, "usage", str(exc))
    except InputError as exc:
        return _fail(EXIT_INPUT, "input", str(exc), {"where": exc.where})
    except DensityPreconditionError as exc:
        return _fail(
            EXIT_PRECONDITION, "precondition", str(exc),
            {"point": exc.point.to_json(), "best_ratio": to_json_number(exc.best_ratio), "bound": to_json_number(exc.bound)},
        )
    except CapExceeded as exc:
        return _fail(EXIT_PRECONDITION, "cap", str(exc), {"what": exc.what, "size": exc.size, "cap": exc.cap})
    except ValueError as exc:
        return _fail(EXIT_INPUT, "input", str(exc))
    _emit(_envelope(args, result), args.out)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
