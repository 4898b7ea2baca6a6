"""Command-line front end.

Subcommands mirror the library one to one: forest enumeration, element
arithmetic, the identity suites, series printing, and the volume and
accuracy experiments.  Every run is fully determined by the subcommand,
the merged configuration and the seed; the seed is echoed in the header
line of all output so runs can be reproduced from their artifacts.

Exit codes: 0 on success and on passing suites, 1 when a suite reports a
failing identity (the counterexample is printed), 2 on usage errors,
malformed configuration or capacity bounds.

A config file holds flat ``key=value`` lines (``#`` comments allowed)
with keys named like the long flags, underscores for dashes; explicit
flags override file values.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .algebroid import (AlgebroidElement, concat_mul, gl_antipode, gl_product,
                        parse_element, theta, triangle)
from .braiding import check_braiding
from .checks import SUITES
from .geomint import (ConfigurationError, ExperimentConfig, geometric_grid,
                      run_experiment)
from .series import exp_gl, field_series, modified_field
from .trees import CapacityError, ParseError, enumerate_forests

SUITE_NAMES = ("axioms", "gl", "theta", "smash", "degenerate", "braiding")

# Per-suite depth defaults, matching the library suite defaults.
SUITE_GRADE = {"axioms": 3, "gl": 4, "theta": 3, "smash": 3,
               "degenerate": 5, "braiding": 3}
SUITE_SAMPLES = {"axioms": 200, "gl": 200, "theta": 100, "smash": 200,
                 "degenerate": 100, "braiding": 200}

BINARY_OPS = {
    "gl": gl_product,
    "triangle": triangle,
    "concat": concat_mul,
}
UNARY_OPS = {
    "theta": theta,
    "antipode": gl_antipode,
}


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="postlie")
    sub = top.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--config", default=None,
                        help="key=value file; flags override")

    trees = sub.add_parser("trees", help="forest combinatorics")
    tsub = trees.add_subparsers(dest="action", required=True)
    enum = tsub.add_parser("enumerate", parents=[common])
    enum.add_argument("--max-grade", type=int, default=None)

    algebra = sub.add_parser("algebra", help="element arithmetic and suites")
    asub = algebra.add_subparsers(dest="action", required=True)
    ev = asub.add_parser("eval", parents=[common])
    ev.add_argument("--op", required=True,
                    choices=sorted(BINARY_OPS) + sorted(UNARY_OPS))
    ev.add_argument("--left", required=True, help="element, e.g. 'o [o] + 2 [oo]'")
    ev.add_argument("--right", default=None)
    chk = asub.add_parser("check", parents=[common])
    chk.add_argument("--suite", required=True, choices=SUITE_NAMES)
    chk.add_argument("--max-grade", type=int, default=None)
    chk.add_argument("--samples", type=int, default=None)
    chk.add_argument("--threads", type=int, default=None)

    series = sub.add_parser("series", help="truncated flow series")
    ssub = series.add_subparsers(dest="action", required=True)
    ge = ssub.add_parser("gl-exp", parents=[common])
    ge.add_argument("--order", type=int, default=None)
    mf = ssub.add_parser("modified-field", parents=[common])
    mf.add_argument("--method", choices=("lie-euler", "aromatic"), default=None)
    mf.add_argument("--order", type=int, default=None)

    exp = sub.add_parser("experiment", help="numeric experiments on the group")
    xsub = exp.add_subparsers(dest="action", required=True)
    for kind in ("volume", "order"):
        x = xsub.add_parser(kind, parents=[common])
        x.add_argument("--method", choices=("lie-euler", "aromatic"), default=None)
        x.add_argument("--group", default=None)
        x.add_argument("--field", default=None)
        x.add_argument("--t-min", type=float, default=None)
        x.add_argument("--t-max", type=float, default=None)
        x.add_argument("--t-points", type=int, default=None)
        x.add_argument("--base-point", choices=("random", "identity"), default=None)
        x.add_argument("--derivatives", choices=("analytic", "fd"), default=None)
        x.add_argument("--out", default=None)
        x.add_argument("--threads", type=int, default=None)
    return top


def _load_config(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}:{lineno}: expected key=value")
            key, _, val = line.partition("=")
            values[key.strip().replace("-", "_")] = val.strip()
    return values


def _resolve(args: argparse.Namespace, key: str, default, cast=None):
    """Flag if given, else config file value, else default."""
    val = getattr(args, key, None)
    if val is not None:
        return val
    cfg = getattr(args, "_config_values", {})
    if key in cfg:
        raw = cfg[key]
        return cast(raw) if cast is not None else raw
    return default


def _header(parts: dict) -> str:
    body = " ".join(f"{k}={v}" for k, v in parts.items())
    return f"# postlie {body}"


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _cmd_trees(args) -> int:
    grade = _resolve(args, "max_grade", 3, int)
    seed = _resolve(args, "seed", 0, int)
    forests = enumerate_forests(grade)
    _emit(_header({"command": "trees-enumerate", "max-grade": grade,
                   "count": len(forests), "seed": seed}))
    for w in forests:
        _emit(str(w))
    return 0


def _cmd_algebra_eval(args) -> int:
    seed = _resolve(args, "seed", 0, int)
    left = parse_element(args.left)
    if args.op in BINARY_OPS:
        if args.right is None:
            raise ConfigurationError(f"--op {args.op} needs --right")
        result = BINARY_OPS[args.op](left, parse_element(args.right))
    else:
        if args.right is not None:
            raise ConfigurationError(f"--op {args.op} takes no --right")
        result = UNARY_OPS[args.op](left)
    _emit(_header({"command": "algebra-eval", "op": args.op, "seed": seed}))
    _emit(result.dump())
    return 0


def _cmd_algebra_check(args) -> int:
    suite = args.suite
    grade = _resolve(args, "max_grade", SUITE_GRADE[suite], int)
    samples = _resolve(args, "samples", SUITE_SAMPLES[suite], int)
    seed = _resolve(args, "seed", 0, int)
    _emit(_header({"command": "algebra-check", "suite": suite,
                   "max-grade": grade, "samples": samples, "seed": seed}))
    if suite == "braiding":
        reports = check_braiding(max_grade=grade, samples=samples,
                                 sample_grade=grade + 1, seed=seed)
    elif suite in ("smash", "degenerate"):
        reports = SUITES[suite](max_grade=grade, samples=samples, seed=seed)
    else:
        reports = SUITES[suite](max_grade=grade, samples=samples,
                                sample_grade=grade + 1, seed=seed)
    failed = 0
    for report in reports:
        _emit(report.line())
        if not report.passed:
            failed += 1
    if failed:
        _emit(f"# {failed} identity(ies) failed; first counterexample on the witness field")
        return 1
    return 0


def _cmd_series(args) -> int:
    order = _resolve(args, "order", 3, int)
    seed = _resolve(args, "seed", 0, int)
    if args.action == "gl-exp":
        series = exp_gl(field_series(order), order)
        head = {"command": "series-gl-exp", "order": order, "seed": seed}
    else:
        method = _resolve(args, "method", None)
        if method is None:
            raise ConfigurationError("modified-field needs --method")
        series = modified_field(method, order)
        head = {"command": "series-modified-field", "method": method,
                "order": order, "seed": seed}
    _emit(_header(head))
    _emit(series.dump())
    return 0


def _cmd_experiment(args) -> int:
    cfg = ExperimentConfig(
        kind=args.action,
        method=_resolve(args, "method", "lie-euler"),
        group=_resolve(args, "group", "so3"),
        field=_resolve(args, "field", "q33-curl"),
        t_grid=geometric_grid(_resolve(args, "t_min", 1e-3, float),
                              _resolve(args, "t_max", 1e-1, float),
                              _resolve(args, "t_points", 8, int)),
        base_point=_resolve(args, "base_point", "random"),
        derivatives=_resolve(args, "derivatives", "analytic"),
        seed=_resolve(args, "seed", 0, int),
        out=_resolve(args, "out", None),
        threads=_resolve(args, "threads", 1, int),
    )
    result = run_experiment(cfg)
    _emit(_header({"command": f"experiment-{cfg.kind}", "method": cfg.method,
                   "group": cfg.group, "field": cfg.field,
                   "t-points": len(cfg.t_grid), "threads": cfg.threads,
                   "seed": cfg.seed}))
    _emit(result.csv())
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(result.csv())
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "config", None):
            args._config_values = _load_config(args.config)
        if args.command == "trees":
            return _cmd_trees(args)
        if args.command == "algebra":
            if args.action == "eval":
                return _cmd_algebra_eval(args)
            return _cmd_algebra_check(args)
        if args.command == "series":
            return _cmd_series(args)
        return _cmd_experiment(args)
    except (ConfigurationError, ParseError, CapacityError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
