"""Command-line interface.

Exit codes: 0 success or passing verdict, 1 failing verdict, 2 usage error,
3 computation error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .apoly import APolyError, apoly
from .knot_input import KnotInputError, KnotPresentation, parse_knot_spec
from .perturb import (
    CorridorTooNarrow, Infeasible, ShearFn, SliceBlocked, check_certificate,
    enumerate_critical_points, plan_finite_avoidance, plan_slice_path,
)
from .pillowcase import PillowSet, ToleranceNotMet, compute_pillowcase, pillow_translate, sampling_gap
from .polyalg import IntPoly2, PolyError
from .render import RenderOptions, render_pillowcase
from .slicecheck import check_all_slices, cross_validate

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_COMPUTE = 0, 1, 2, 3
GRID_MIN, GRID_MAX = 8, 100000


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# deterministic serialization
# ---------------------------------------------------------------------------

def _num(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    text = format(x, ".17g")
    if "." not in text and "e" not in text and "inf" not in text:
        text += ".0"
    return text


def dumps(obj, indent=0):
    """JSON with insertion-ordered keys and floats at 17 significant digits."""
    pad = " " * indent
    inner = " " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, int, float)):
        return _num(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, str)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + dumps(v, indent + 1) for v in obj) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _read_text(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc


def _load_set(path, delta=None):
    text = _read_text(path)
    if path.endswith(".json"):
        return PillowSet.from_json_obj(json.loads(text))
    return PillowSet.from_csv(text, delta=delta)


def _load_shear(path):
    try:
        return ShearFn.from_json_obj(json.loads(_read_text(path)))
    except (ValueError, KeyError) as exc:
        raise UsageError(f"{path}: invalid shear function ({exc})") from exc


def _load_apoly(path):
    obj = json.loads(_read_text(path))
    return IntPoly2.from_json_obj(obj)


def _knot(spec):
    if spec.endswith(".json"):
        return KnotPresentation.from_json_obj(json.loads(_read_text(spec)))
    return parse_knot_spec(spec)


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass
class RunConfig:
    subcommand: str
    options: dict = field(default_factory=dict)

    def validate(self):
        for key in ("tol",):
            v = self.options.get(key)
            if v is not None and not v > 0:
                raise UsageError(f"--{key} must be positive")
        n = self.options.get("n")
        if n is not None and not GRID_MIN <= n <= GRID_MAX:
            raise UsageError(f"--n must lie in [{GRID_MIN}, {GRID_MAX}]")
        for key in ("width", "height"):
            v = self.options.get(key)
            if v is not None and v <= 0:
                raise UsageError(f"--{key} must be positive")


POSITIONALS = {
    "apoly": ["knot"], "pillowcase": ["knot"], "slices": ["apoly"],
    "validate": ["apoly", "set"], "render": ["set"],
}


def config_to_argv(cfg):
    if "subcommand" not in cfg:
        raise UsageError("config needs a 'subcommand' entry")
    sub = cfg["subcommand"]
    argv = [sub]
    for name in POSITIONALS.get(sub, []):
        if name in cfg:
            argv.append(str(cfg[name]))
    for key, value in cfg.items():
        if key == "subcommand" or key in POSITIONALS.get(sub, []):
            continue
        flag = "--" + key.replace("_", "-")
        if value is True:
            argv.append(flag)
        elif value is False or value is None:
            continue
        else:
            argv.extend([flag, str(value)])
    return argv


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _gap_note(s):
    """Sampling gap of s; warns when it exceeds the 2 delta that margin thresholds assume."""
    gap = sampling_gap(s)
    if gap > 2 * s.delta:
        print(f"warning: sampling gap {gap:.3g} exceeds 2 delta = {2 * s.delta:.3g}; "
              "thresholds assume every point of the underlying set lies within delta of a sample",
              file=sys.stderr)
    return gap


def cmd_apoly(args):
    result = apoly(_knot(args.knot))
    print(result.factored_string())
    if args.verbose:
        for line in result.diagnostics:
            print(line, file=sys.stderr)
    if args.output:
        obj = {"label": args.knot, **result.to_json_obj()}
        _write(dumps(obj) + "\n", args.output)
    return EXIT_OK


def cmd_pillowcase(args):
    s = compute_pillowcase(_knot(args.knot), args.n, args.tol, args.seeds, args.workers)
    if args.json:
        _write(dumps(s.to_json_obj(args.witnesses)) + "\n", args.output)
    else:
        _write(s.to_csv(), args.output)
    print(f"{len(s)} points", file=sys.stderr)
    return EXIT_OK


def cmd_plan(args):
    if args.set:
        s = _load_set(args.set)
        try:
            plan = plan_finite_avoidance(s)
        except Infeasible as exc:
            print(f"infeasible: {exc}", file=sys.stderr)
            print(dumps({"verdict": "infeasible", "blocking": [list(p) for p in exc.blocking]}))
            return EXIT_FAIL
        if args.g1_out:
            _write(dumps(plan.g1.to_json_obj()) + "\n", args.g1_out)
        if args.g2_out:
            _write(dumps(plan.g2.to_json_obj()) + "\n", args.g2_out)
        obj = plan.certificate.to_json_obj()
        obj["sampling_gap"] = _gap_note(s)
        print(dumps(obj))
        return EXIT_OK
    if args.knot is None or args.eta0 is None:
        raise UsageError("plan needs --set, or --knot together with --eta0")
    reps = compute_pillowcase(_knot(args.knot), args.n, args.tol)
    shifted = pillow_translate(reps, 0.0, -math.pi)
    try:
        g = plan_slice_path(shifted, args.eta0)
    except SliceBlocked as exc:
        print(f"slice blocked: {exc}", file=sys.stderr)
        print(dumps({"verdict": "slice-blocked", "blocking": [list(p) for p in exc.blocking[:10]]}))
        return EXIT_FAIL
    except CorridorTooNarrow as exc:
        print(f"corridor too narrow: {exc}", file=sys.stderr)
        return EXIT_FAIL
    obj = g.to_json_obj()
    obj["path"] = {"eta0": g.info["eta0"], "level": g.info["level"],
                   "half_width": g.info["corridor_half_width"], "graph_clearance": g.info["graph_clearance"],
                   "sampling_gap": _gap_note(reps)}
    _write(dumps(obj) + "\n", args.output)
    return EXIT_OK


def cmd_certify(args):
    s = _load_set(args.set)
    cert = check_certificate(s, _load_shear(args.g1), _load_shear(args.g2))
    obj = cert.to_json_obj()
    obj["sampling_gap"] = _gap_note(s)
    _write(dumps(obj) + "\n", args.output)
    return EXIT_OK if cert.passed else EXIT_FAIL


def cmd_critical(args):
    p1, p2 = _load_set(args.p1), _load_set(args.p2)
    matches = enumerate_critical_points(p1, p2, _load_shear(args.g1), _load_shear(args.g2), args.tol)
    _write(dumps({"count": len(matches), "matches": [m.to_json_obj() for m in matches]}) + "\n", args.output)
    return EXIT_OK


def cmd_slices(args):
    report = check_all_slices(_load_apoly(args.apoly), args.n, args.tol)
    if args.output:
        _write(report.to_csv(), args.output)
    worst = max(e.min_unit_distance for e in report.entries)
    print(dumps({"verdict": report.verdict, "slices": len(report.entries), "failing": len(report.failures),
                 "worst_distance": worst, "tol": report.tol}))
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_validate(args):
    a = _load_apoly(args.apoly)
    s = _load_set(args.set)
    report = cross_validate(a, s, args.tol)
    _write(dumps(report.to_json_obj()) + "\n", args.output)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_render(args):
    s = _load_set(args.set)
    second = _load_set(args.second) if args.second else None
    shear = path = None
    if args.shear:
        obj = json.loads(_read_text(args.shear))
        shear = ShearFn.from_json_obj(obj)
        path = obj.get("path")
    opts = RenderOptions(args.width, args.height, args.radius)
    _write(render_pillowcase(s, second, shear, path, opts, title=s.label), args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    p = _Parser(prog="knotapoly", description="A-polynomials and SU(2) pillowcase samples of knots.")
    p.add_argument("--config", help="JSON document with subcommand and options")
    sub = p.add_subparsers(dest="subcommand", parser_class=_Parser)

    a = sub.add_parser("apoly", help="A-polynomial by resultant elimination")
    a.add_argument("knot", help="p/q, torus:p,q, braid:<word> or a presentation .json")
    a.add_argument("-o", "--output", help="write A-polynomial JSON here")
    a.add_argument("-v", "--verbose", action="store_true")

    pc = sub.add_parser("pillowcase", help="sample boundary holonomy angles")
    pc.add_argument("knot")
    pc.add_argument("--n", type=int, default=360)
    pc.add_argument("--tol", type=float, default=1e-10)
    pc.add_argument("--seeds", type=int, default=512)
    pc.add_argument("--workers", type=int, default=None)
    pc.add_argument("--json", action="store_true")
    pc.add_argument("--witnesses", action="store_true")
    pc.add_argument("-o", "--output")

    pl = sub.add_parser("plan", help="shear planners")
    pl.add_argument("--knot")
    pl.add_argument("--eta0", type=float)
    pl.add_argument("--set", help="finite point set (CSV) for the avoidance planner")
    pl.add_argument("--g1-out")
    pl.add_argument("--g2-out")
    pl.add_argument("--n", type=int, default=360)
    pl.add_argument("--tol", type=float, default=1e-10)
    pl.add_argument("-o", "--output")

    ce = sub.add_parser("certify", help="non-intersection certificate")
    ce.add_argument("--set", required=True)
    ce.add_argument("--g1", required=True)
    ce.add_argument("--g2", required=True)
    ce.add_argument("-o", "--output")

    cr = sub.add_parser("critical", help="enumerate chained critical points")
    cr.add_argument("--p1", required=True)
    cr.add_argument("--p2", required=True)
    cr.add_argument("--g1", required=True)
    cr.add_argument("--g2", required=True)
    cr.add_argument("--tol", type=float, default=1e-6)
    cr.add_argument("-o", "--output")

    sl = sub.add_parser("slices", help="unit-torus slice check")
    sl.add_argument("apoly")
    sl.add_argument("--n", type=int, default=360)
    sl.add_argument("--tol", type=float, default=1e-8)
    sl.add_argument("-o", "--output", help="write the per-slice CSV here")

    va = sub.add_parser("validate", help="evaluate an A-polynomial on pillowcase samples")
    va.add_argument("apoly")
    va.add_argument("set")
    va.add_argument("--tol", type=float, default=1e-6)
    va.add_argument("-o", "--output")

    re = sub.add_parser("render", help="SVG drawing of a point set")
    re.add_argument("set")
    re.add_argument("-o", "--output")
    re.add_argument("--second")
    re.add_argument("--shear", help="shear JSON; a 'path' entry adds the corridor overlay")
    re.add_argument("--width", type=int, default=600)
    re.add_argument("--height", type=int, default=600)
    re.add_argument("--radius", type=float, default=1.6)
    return p


COMMANDS = {
    "apoly": cmd_apoly, "pillowcase": cmd_pillowcase, "plan": cmd_plan, "certify": cmd_certify,
    "critical": cmd_critical, "slices": cmd_slices, "validate": cmd_validate, "render": cmd_render,
}


def _parse(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            cfg = json.loads(_read_text(args.config))
        except json.JSONDecodeError as exc:
            raise UsageError(f"{args.config}: {exc}") from exc
        rest = [a for a in argv if a != "--config" and a != args.config]
        if args.subcommand:
            rest = rest[rest.index(args.subcommand) + 1:]
            cfg = {"subcommand": args.subcommand, **cfg}
        args = parser.parse_args(config_to_argv(cfg) + rest)
    if not args.subcommand:
        raise UsageError("missing subcommand")
    opts = {k: v for k, v in vars(args).items() if k not in ("subcommand", "config")}
    RunConfig(args.subcommand, opts).validate()
    return args


def run(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _parse(argv)
        return COMMANDS[args.subcommand](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KnotInputError as exc:
        print(f"invalid knot: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (APolyError, PolyError, ToleranceNotMet, ArithmeticError) as exc:
        print(f"computation error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"usage error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
