"""Command-line entry points.

Subcommands:
  run            execute a preset over a horizon grid, write CSV metrics
  validate       parse and sanity-check a config file
  oracle         print the centralized reference solution for a preset
  network-check  validate a schedule and its geometric mixing bound

Exit codes: 0 success, 1 validation failure, 2 runtime failure.
"""

import argparse
import sys

import numpy as np

from .errors import DfoError
from .harness import (
    DEFAULT_SEED,
    DEFAULT_T_GRID,
    PRESET_NAMES,
    get_presets,
    preset_reference,
    run_preset,
    validate_config,
)
from .network import (
    matching_cycle_schedule,
    mixing_bound,
    ring_schedule,
    transition,
    validate_assumption1,
)

OVERRIDE_TYPES = {
    "m": int, "n": int, "d": int,
    "gamma": float, "lam": float, "sigma": float, "eta": float,
    "outlier_shift": float,
    "loss_kind": str, "step_rule": str, "schedule_kind": str, "scale": str,
}


def _parse_overrides(pairs):
    out = {}
    for pair in pairs or ():
        if "=" not in pair:
            raise DfoError("bad-config", f"--set expects key=value, got {pair!r}")
        key, val = pair.split("=", 1)
        if key not in OVERRIDE_TYPES:
            raise DfoError("bad-config", f"unknown override {key!r}")
        caster = OVERRIDE_TYPES[key]
        out[key] = caster(val)
    if "scale" in out and out["scale"] != "1/m":
        out["scale"] = float(out["scale"])
    return out


def cmd_run(args):
    t_grid = tuple(int(v) for v in args.tgrid.split(",")) if args.tgrid else DEFAULT_T_GRID
    overrides = _parse_overrides(args.set)
    results = run_preset(
        args.preset, t_grid=t_grid, seed=args.seed, out=args.out,
        stride=args.stride, **overrides,
    )
    for tag, rows in results.items():
        print(f"{tag}:")
        for row in rows:
            print(
                f"  T={row.T:<6d} max_err={row.max_err:.6e} min_err={row.min_err:.6e} "
                f"consensus={row.mean_consensus:.3e} empirical_G={row.empirical_G:.3e}"
            )
    if args.out:
        print(f"csv written to pattern: {args.out}")
    return 0


def cmd_validate(args):
    passed, messages = validate_config(args.config)
    for msg in messages:
        print(msg)
    print("validation:", "pass" if passed else "fail")
    return 0 if passed else 1


def cmd_oracle(args):
    overrides = _parse_overrides(args.set)
    for tag, preset in get_presets(args.preset, **overrides):
        report = preset_reference(preset, seed=args.seed)
        print(f"{tag}: method={report.method}")
        print(f"  J* = {report.value:.12g}")
        if report.grad_norm is not None:
            print(f"  gradient norm at solution = {report.grad_norm:.3e}")
        if report.mu is not None:
            print(f"  mu = {report.mu:.6g}")
        for note in report.notes:
            print(f"  note: {note}")
    return 0


def cmd_network_check(args):
    if args.schedule == "ring":
        schedule = ring_schedule(args.m)
    else:
        schedule = matching_cycle_schedule(args.m)
    report = validate_assumption1(schedule, args.horizon)
    for issue in report.issues:
        print(issue)
    worst = 0.0
    for s in range(1, args.horizon + 1):
        Q = transition(schedule, s, s)
        for t in range(s, args.horizon + 1):
            if t > s:
                Q = schedule.matrix(t) @ Q
            dev = float(np.max(np.abs(Q - 1.0 / schedule.m)))
            bound = mixing_bound(schedule.m, schedule.zeta, schedule.B, t - s)
            worst = max(worst, dev - bound)
    print(
        f"schedule={schedule.kind} m={schedule.m} B={schedule.B} zeta={schedule.zeta:g} "
        f"assumption-check={'pass' if report.passed else 'fail'}"
    )
    print(f"max (deviation - geometric bound) over horizon: {worst:.3e} (<= 0 means the bound holds)")
    ok = report.passed and worst <= 0
    print("network-check:", "pass" if ok else "fail")
    return 0 if ok else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="dfosim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment preset")
    p_run.add_argument("--preset", required=True, choices=PRESET_NAMES)
    p_run.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_run.add_argument("--out", default=None, help="CSV output path (sweeps expand the name)")
    p_run.add_argument("--tgrid", default=None, help="comma-separated horizons")
    p_run.add_argument("--stride", type=int, default=None, help="metric recording stride")
    p_run.add_argument("--set", action="append", metavar="KEY=VALUE", help="preset overrides")
    p_run.set_defaults(func=cmd_run)

    p_val = sub.add_parser("validate", help="validate a config file")
    p_val.add_argument("--config", required=True)
    p_val.set_defaults(func=cmd_validate)

    p_or = sub.add_parser("oracle", help="print the centralized reference solution")
    p_or.add_argument("--preset", required=True, choices=PRESET_NAMES)
    p_or.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p_or.add_argument("--set", action="append", metavar="KEY=VALUE")
    p_or.set_defaults(func=cmd_oracle)

    p_net = sub.add_parser("network-check", help="validate a generated schedule")
    p_net.add_argument("--m", type=int, required=True)
    p_net.add_argument("--horizon", type=int, default=100)
    p_net.add_argument("--schedule", choices=("ring", "matching-cycle"), default="ring")
    p_net.set_defaults(func=cmd_network_check)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DfoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1 if exc.code in ("bad-config", "bad-schedule", "entry-floor") else 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
