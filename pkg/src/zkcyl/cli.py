"""Command-line interface.

Subcommands::

    zkcyl ground-state [--config cfg.yaml] [--set path=value ...] --out Q.zks
    zkcyl evolve --config cfg.yaml [--profile Q.zks] [--out DIR]
    zkcyl scenario NAME [--profile Q.zks] [--out DIR] [--set path=value ...]
    zkcyl resume --snapshot S.zks --legs t:N[,t:N...] [--out DIR]
    zkcyl diag --run DIR

``--set`` takes dotted configuration paths (``grid.N=1024``); CLI values
override the config file. Exit codes: 0 success, 2 blow-up stop, 3 solver
failure, 4 configuration error.
"""

import argparse
import json
import os
import sys

from .config import SimConfig, config_to_dict, load_config
from .errors import ConfigurationError, SnapshotError, SolverFailure
from .fields import Field, Nonlinearity
from .diagnostics import make_record, write_series
from .fourier import make_torus_grid
from .radial import build_layout
from .scenarios import (
    PRESETS,
    apply_overrides,
    preset_config,
    resume,
    run_from_config,
    run_scenario,
    solve_profile,
)
from .snapshots import load_snapshot

EXIT_OK = 0
EXIT_BLOWUP = 2
EXIT_SOLVER = 3
EXIT_CONFIG = 4


def _parse_set(pairs):
    overrides = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise ConfigurationError(f"--set expects path=value, got {pair!r}")
        key, raw = pair.split("=", 1)
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        overrides[key.strip()] = value
    return overrides


def _parse_legs(spec):
    legs = []
    if not spec:
        return legs
    for part in spec.split(","):
        t, n = part.split(":")
        legs.append((float(t), int(n)))
    return legs


def _base_config(args):
    cfg = load_config(args.config) if args.config else SimConfig().validate()
    return apply_overrides(cfg, _parse_set(args.set))


def cmd_ground_state(args):
    cfg = _base_config(args)
    prof = solve_profile(cfg, args.out, verbose=not args.quiet)
    print(
        f"ground state: mass={prof.mass:.6f} energy={prof.energy:.3e} "
        f"residual={prof.residual_norm:.3e} -> {args.out}"
    )
    return EXIT_OK


def cmd_evolve(args):
    cfg = _base_config(args)
    if args.out:
        cfg.output.directory = args.out
    report, _, _ = run_from_config(cfg, profile_path=args.profile)
    print(f"run finished: {report.stop_reason} -> {report.run_dir}")
    return report.exit_code


def cmd_scenario(args):
    report = run_scenario(
        args.name,
        overrides=_parse_set(args.set),
        output_dir=args.out,
        profile_path=args.profile,
    )
    print(f"scenario {args.name}: {report.stop_reason} -> {report.run_dir}")
    return report.exit_code


def cmd_resume(args):
    report = resume(
        args.snapshot,
        _parse_legs(args.legs),
        output_dir=args.out,
        overrides=_parse_set(args.set),
    )
    print(f"resume: {report.stop_reason} -> {report.run_dir}")
    return report.exit_code


def cmd_diag(args):
    """Recompute the diagnostics series from the snapshots of a run."""
    snap_dir = os.path.join(args.run, "snapshots")
    if not os.path.isdir(snap_dir):
        raise ConfigurationError(f"{args.run}: no snapshots directory")
    names = sorted(n for n in os.listdir(snap_dir) if n.endswith(".zks"))
    records = []
    for name in names:
        snap = load_snapshot(os.path.join(snap_dir, name))
        cfg_echo = snap.config
        grid = make_torus_grid(cfg_echo["grid"]["L"], cfg_echo["grid"]["N"])
        lay_meta = cfg_echo["layout"]
        layout = build_layout(
            lay_meta["rho0"], lay_meta["rho1"], lay_meta["N_I"], lay_meta["N_II"]
        )
        nl = Nonlinearity(cfg_echo["physics"]["p"])
        fld = Field(snap.values, grid, layout)
        records.append(make_record(snap.t, fld, nl))
    records.sort(key=lambda r: r.t)
    out = os.path.join(args.run, "series_recomputed.csv")
    write_series(out, records)
    print(f"recomputed {len(records)} records -> {out}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="zkcyl",
        description="Cylindrically symmetric spectral solver for the generalized ZK equation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ground-state", help="solve and persist the solitary-wave profile")
    p.add_argument("--config", help="YAML configuration file")
    p.add_argument("--set", action="append", metavar="PATH=VALUE")
    p.add_argument("--out", default="runs/ground-state/profile.zks")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_ground_state)

    p = sub.add_parser("evolve", help="run the legs of a configuration")
    p.add_argument("--config", help="YAML configuration file")
    p.add_argument("--set", action="append", metavar="PATH=VALUE")
    p.add_argument("--profile", help="ground-state profile snapshot")
    p.add_argument("--out", help="run directory (overrides output.directory)")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("scenario", help="run a named preset")
    p.add_argument("name", choices=sorted(PRESETS))
    p.add_argument("--set", action="append", metavar="PATH=VALUE")
    p.add_argument("--profile", help="ground-state profile snapshot")
    p.add_argument("--out", help="run directory")
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("resume", help="continue a run from a snapshot")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--legs", help="extension schedule t_end:N_t[,t_end:N_t...]")
    p.add_argument("--set", action="append", metavar="PATH=VALUE")
    p.add_argument("--out", help="run directory (defaults to the snapshot's)")
    p.set_defaults(func=cmd_resume)

    p = sub.add_parser("diag", help="recompute diagnostics from stored snapshots")
    p.add_argument("--run", required=True)
    p.set_defaults(func=cmd_diag)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SnapshotError as exc:
        print(f"snapshot error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverFailure as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
