"""Command line front end.

Exit codes: 0 when every gate in the requested experiment is satisfied,
1 when a violation is detected (a bound failure, an identity error above
tolerance, or a slope/ratio outside its band), 2 on a configuration
error.  Bracket diagnostics are recorded in the output but never gate
the exit code.
"""

import argparse
import sys

from .errors import ConfigError
from .experiments import (RUNNERS, ExperimentConfig, result_to_json,
                          write_rows)

_DEFAULTS = {
    "toeplitz-sharpness": {"gamma_grid": [0.4, 0.2, 0.1, 0.05, 0.025],
                           "r_list": [1.0, 2.0]},
    "dd-sharpness": {"gamma_grid": [0.5, 0.4, 0.3, 0.2, 0.1],
                     "r_list": [2.0]},
    "jaffard-check": {"gamma_grid": [], "r_list": [2.0]},
    "quotient-verify": {"gamma_grid": [], "r_list": []},
    "besov-report": {"gamma_grid": [0.5, 0.3, 0.2], "r_list": [0.5, 1.5]},
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="decayinv",
        description="Sharpness sweeps and bound checks for inverses of "
                    "matrices with off-diagonal decay.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "toeplitz-sharpness": "inverse-norm growth of the resolvent family",
        "dd-sharpness": "iterated-derivation norm growth of the resolvent",
        "jaffard-check": "random polynomial-decay instances vs. J_r bounds",
        "quotient-verify": "relative errors of the smoothness identities",
        "besov-report": "Besov/hypersingular seminorm tables and checks",
    }
    for name in RUNNERS:
        sp = sub.add_parser(name, help=helps[name])
        sp.add_argument("--config", metavar="PATH",
                        help="JSON experiment config")
        sp.add_argument("--out", metavar="PATH", help="row table destination")
        sp.add_argument("--format", choices=("csv", "json"),
                        help="row table format (default csv)")
        sp.add_argument("--seed", type=int, help="override the base seed")
        sp.add_argument("--window", type=int, metavar="N",
                        help="override window_N")
    return parser


def resolve_config(args):
    if args.config:
        cfg = ExperimentConfig.from_json(args.config)
        if cfg.experiment and cfg.experiment != args.command:
            raise ConfigError(
                f"config is for {cfg.experiment!r}, not {args.command!r}")
    else:
        cfg = ExperimentConfig(experiment=args.command,
                               **_DEFAULTS[args.command])
    cfg.experiment = args.command
    if args.seed is not None:
        cfg.seed = args.seed
    if args.window is not None:
        cfg.window_N = args.window
    if args.format is not None:
        cfg.format = args.format
    if args.out is not None:
        cfg.output = args.out
    if not cfg.output:
        ext = "json" if cfg.format == "json" else "csv"
        cfg.output = f"{args.command}.{ext}"
    cfg.validate()
    return cfg


def find_violations(command, cfg, result):
    tol = cfg.tolerances
    bad = []
    if command == "toeplitz-sharpness":
        band = float(tol.get("slope_tol", 0.15))
        for r, fit in result["fits"].items():
            target = -(float(r) + 1.0)
            if abs(fit.slope - target) > band:
                bad.append(f"slope at r={r} is {fit.slope:.6f}, "
                           f"wanted {target} within {band}")
    elif command == "dd-sharpness":
        lo = float(tol.get("ratio_low", 0.5))
        hi = float(tol.get("ratio_high", 2.0))
        for row in result["rows"]:
            if not lo <= row["ratio"] <= hi:
                bad.append(f"ratio at gamma={row['gamma']} r={row['r']} is "
                           f"{row['ratio']:.6f}, outside [{lo}, {hi}]")
            if not row["converged"]:
                bad.append(f"norm sum at gamma={row['gamma']} r={row['r']} "
                           f"did not converge")
    elif command == "jaffard-check":
        for row in result["rows"]:
            if not row["satisfied"]:
                bad.append(f"instance seed={row['seed']} r={row['r']}: "
                           f"measured {row['measured']:.6e} exceeds a bound")
    elif command == "quotient-verify":
        gate = float(tol.get("max_rel_err", 1e-8))
        for name, err in sorted(result["worst"].items()):
            if err > gate:
                bad.append(f"{name}: max relative error {err:.3e} > {gate}")
    elif command == "besov-report":
        for row in result["rows"]:
            if row.get("ncb_ok") is False:
                bad.append(f"first-order control failed at "
                           f"param={row['param']} r={row['r']}: "
                           f"{row['ncb_lhs']:.6e} > {row['ncb_rhs']:.6e}")
    return bad


def _print_summary(command, result, out):
    fits = result.get("fits")
    if fits:
        for r, fit in fits.items():
            if fit is not None:
                print(f"  fit r={r}: slope {fit.slope:.6f} "
                      f"(residual {fit.residual:.2e})")
    worst = result.get("worst")
    if worst:
        for name, err in sorted(worst.items()):
            print(f"  {name}: max rel err {err:.3e}")
    cal = result.get("calibrations")
    if cal:
        for r, entry in cal.items():
            parts = ", ".join(f"{k} drift {v['drift']:.3f}"
                              for k, v in entry.items() if v["ratios"])
            if parts:
                print(f"  r={r}: {parts}")
    print(f"{command}: {len(result['rows'])} rows -> {out}")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        result = RUNNERS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if cfg.format == "json":
        payload = result_to_json(result)
        write_rows(payload.get("rows", []), cfg.output, "json")
    else:
        write_rows(result["rows"], cfg.output, "csv")
    _print_summary(args.command, result, cfg.output)
    violations = find_violations(args.command, cfg, result)
    for line in violations:
        print(f"violation: {line}", file=sys.stderr)
    return 1 if violations else 0


if __name__ == "__main__":
    sys.exit(main())
