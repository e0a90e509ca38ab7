"""Command-line front end.

Subcommands
-----------
estimate-f  sweep QMC points and write the f(mu) table, with checkpoints
integrate   turn an f table into separable volume and probability
jacobian    dump (mu, jac) samples as CSV
validate    run the bundled oracle checks and report pass/fail as JSON

Exit codes: 0 success, 2 usage, 3 bad input, 4 numerical failure,
5 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import jacobian as jb
from . import validate as val
from .checkpoint import run as run_checkpointed
from .config import GOLDEN, RunConfig, _parse_float, read_values
from .estimator import FTable, integrate_volume
from .qmc import KINDS

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_NUMERICAL, EXIT_VALIDATION = 0, 2, 3, 4, 5

# published reference numbers, printed next to each run for comparison
REFERENCE = {
    "real": {
        "f": {1.0: 114.62368, 0.5: 74.108728, GOLDEN: 88.312344},
        "split_low": 0.0006707668,
        "v_sep": 0.0007298112,
        "probability": 0.45313001,
    },
    "complex": {
        "f": {1.0: 387.333, 0.5: 180.605, GOLDEN: 251.158},
        "split_low": 2.327058044e-7,
        "v_sep": 2.625622678e-7,
        "probability": 0.23250991,
    },
}
CONJECTURE_COMPLEX_V_SEP = (5 * math.sqrt(3)) ** -7
CONJECTURE_COMPLEX_PROBABILITY = 0.242379

# flag name -> RunConfig field
_CONFIG_FLAGS = {
    "case": "case",
    "points": "points",
    "grid": "grid_size",
    "extra_mu": "extra_mu",
    "seed": "seed",
    "sequence": "sequence",
    "skip": "skip",
    "path": "path",
    "workers": "workers",
    "switch_point": "switch_point",
    "series_degree": "series_degree",
    "interp_degree": "interp_degree",
    "out": "out",
    "checkpoint_every": "checkpoint_every",
}


class InputError(Exception):
    pass


def _int(text: str) -> int:
    # accepts 1e6 style counts
    v = float(text)
    if v != int(v):
        raise argparse.ArgumentTypeError(f"not an integer: {text}")
    return int(v)


def _mu(text: str) -> float:
    try:
        return _parse_float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _add_sampling_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--case", choices=("real", "complex"))
    p.add_argument("--grid", type=_int, metavar="N", help="number of equally spaced mu values on [0, 1]")
    p.add_argument("--extra-mu", type=_mu, nargs="+", metavar="MU",
                   help="extra grid values; accepts fractions and 'golden'")
    p.add_argument("--seed", type=_int)
    p.add_argument("--sequence", choices=KINDS)
    p.add_argument("--skip", type=_int, help="leading QMC indices to discard")
    p.add_argument("--path", choices=("fast", "slow"))


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="key-value config file; flags take precedence")
    _add_sampling_flags(p)
    p.add_argument("--points", type=_int)
    p.add_argument("--workers", type=_int)
    p.add_argument("--switch-point", type=float)
    p.add_argument("--series-degree", type=_int)
    p.add_argument("--interp-degree", type=_int)
    p.add_argument("--checkpoint-every", type=_int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sepvol", description="Two-qubit separable volume estimation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate-f", help="sample f(mu) on a grid")
    _add_run_flags(p)
    p.add_argument("--out", help="output directory (default: run)")
    p.add_argument("--resume", action="store_true", help="continue from <out>/checkpoint.json")

    p = sub.add_parser("integrate", help="integrate an f table against the jacobian")
    p.add_argument("table", type=Path, help="ftable.csv written by estimate-f")
    _add_sampling_flags(p)
    p.add_argument("--switch-point", type=float)
    p.add_argument("--series-degree", type=_int)
    p.add_argument("--interp-degree", type=_int)
    p.add_argument("--out", type=Path, help="report JSON path (default: next to the table)")

    p = sub.add_parser("jacobian", help="tabulate the jacobian as CSV")
    p.add_argument("--case", choices=("real", "complex"), default="real")
    p.add_argument("--mode", choices=("stable", "naive"), default="stable")
    p.add_argument("--grid", type=_int, default=1001, metavar="N")
    p.add_argument("--mu-min", type=_mu)
    p.add_argument("--mu-max", type=_mu, default=1.0)
    p.add_argument("--switch-point", type=float, default=0.95)
    p.add_argument("--series-degree", type=_int, default=100)
    p.add_argument("--out", type=Path, help="CSV path (default: stdout)")

    p = sub.add_parser("validate", help="run oracle checks")
    _add_run_flags(p)
    p.add_argument("--oracle-cases", type=_int, default=10_000)
    p.add_argument("--out", type=Path, help="also write the JSON report here")
    # fault injection for testing the validator itself
    p.add_argument("--weight-scale", type=float, default=1.0, help=argparse.SUPPRESS)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Config file values overlaid with any flags given on the command line."""
    values = read_values(args.config) if getattr(args, "config", None) else {}
    for flag, name in _CONFIG_FLAGS.items():
        v = getattr(args, flag, None)
        if v is not None and not (flag == "out" and not isinstance(v, str)):
            values[name] = tuple(v) if flag == "extra_mu" else v
    return RunConfig.from_dict(values)


def _progress(total: int):
    def report(acc):
        print(f"  {acc.total_points}/{total} points, {acc.density_count} positive", file=sys.stderr)
    return report


def _quoted_f(table: FTable) -> list[tuple[float, float, float]]:
    rows = []
    for mu, ref in REFERENCE[table.case]["f"].items():
        try:
            rows.append((mu, table.f_at(mu), ref))
        except KeyError:
            continue
    return rows


def cmd_estimate_f(args) -> int:
    config = config_from_args(args)
    print(f"sepvol estimate-f: {config.case}, {config.points} points, digest {config.digest()}", file=sys.stderr)
    table = run_checkpointed(config, resume=args.resume, on_checkpoint=_progress(config.points))
    print(f"wrote {Path(config.out) / 'ftable.csv'}")
    print(f"f_total = {table.f_total:.6f}")
    for mu, f, ref in _quoted_f(table):
        print(f"f({mu:.10g}) = {f:.6f}   reference {ref}")
    return EXIT_OK


def _check_table_flags(table: FTable, args) -> None:
    given = {name: getattr(args, flag) for flag, name in _CONFIG_FLAGS.items()
             if hasattr(args, flag) and getattr(args, flag) is not None
             and name in ("case", "grid_size", "extra_mu", "seed", "sequence", "skip", "path")}
    if not given:
        return
    if "extra_mu" in given:
        given["extra_mu"] = tuple(given["extra_mu"])
    wanted = RunConfig.from_dict(table.config).with_overrides(**given)
    if wanted.digest() != table.digest:
        raise InputError(f"table digest {table.digest} does not match the requested configuration ({wanted.digest()})")


def comparison_lines(report) -> list[str]:
    ref = REFERENCE[report.case]
    rows = [
        ("split [0, switch]", report.split_low, ref["split_low"]),
        ("V_sep", report.v_sep, ref["v_sep"]),
        ("probability", report.probability, ref["probability"]),
    ]
    if report.case == "complex":
        rows += [
            ("V_sep (conjecture)", report.v_sep, CONJECTURE_COMPLEX_V_SEP),
            ("probability (conjecture)", report.probability, CONJECTURE_COMPLEX_PROBABILITY),
        ]
    lines = [f"{'quantity':<26}{'this run':>16}{'reference':>16}{'ratio':>10}"]
    for name, mine, theirs in rows:
        lines.append(f"{name:<26}{mine:>16.8g}{theirs:>16.8g}{mine / theirs:>10.5f}")
    return lines


def cmd_integrate(args) -> int:
    if not args.table.exists():
        raise InputError(f"no such table: {args.table}")
    table = FTable.read(args.table)
    _check_table_flags(table, args)
    cfg = RunConfig.from_dict(table.config).with_overrides(
        switch_point=args.switch_point, series_degree=args.series_degree, interp_degree=args.interp_degree)
    ev = jb.JacobianEvaluator(table.case, cfg.switch_point, cfg.series_degree)
    report = integrate_volume(table, ev, cfg.interp_degree)
    out = args.out or args.table.with_name(args.table.stem + ".report.json")
    payload = json.loads(report.to_json())
    payload["digest"] = table.digest
    Path(out).write_text(json.dumps(payload, indent=2))
    for line in comparison_lines(report):
        print(line)
    print(f"report written to {out}")
    return EXIT_OK


def cmd_jacobian(args) -> int:
    n = args.grid
    if n < 2:
        raise InputError("--grid needs at least 2 points")
    lo = args.mu_min if args.mu_min is not None else 1.0 / n
    hi = args.mu_max
    if not (0 < lo <= hi <= 1):
        raise InputError(f"mu range [{lo}, {hi}] is outside (0, 1]")
    mu = np.linspace(lo, hi, n)
    ev = jb.JacobianEvaluator(args.case, args.switch_point, args.series_degree)
    stable = ev(mu)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh)
        if args.mode == "stable":
            w.writerow(["mu", "jac"])
            w.writerows((repr(float(m)), repr(float(j))) for m, j in zip(mu, stable))
        else:
            with np.errstate(all="ignore"):
                naive = jb.closed_form_naive(args.case, mu)
            w.writerow(["mu", "jac_naive", "jac_stable"])
            w.writerows((repr(float(m)), repr(float(a)), repr(float(b))) for m, a, b in zip(mu, naive, stable))
            flips = mu[1:][np.sign(naive[1:]) != np.sign(naive[:-1])]
            if len(flips):
                print(f"naive sign changes: {len(flips)}, first near mu = {flips[0]:.6f}", file=sys.stderr)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return EXIT_OK


def cmd_validate(args) -> int:
    config = config_from_args(args)
    checks = val.run_checks(config, args.oracle_cases, args.weight_scale)
    ok = val.summary(checks)
    report = {"passed": ok, "digest": config.digest(), "checks": [c.to_dict() for c in checks]}
    text = json.dumps(report, indent=2)
    print(text)
    if args.out:
        args.out.write_text(text)
    return EXIT_OK if ok else EXIT_VALIDATION


_COMMANDS = {
    "estimate-f": cmd_estimate_f,
    "integrate": cmd_integrate,
    "jacobian": cmd_jacobian,
    "validate": cmd_validate,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ArithmeticError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (InputError, ValueError, KeyError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
