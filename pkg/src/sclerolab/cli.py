"""Command-line front end.

Subcommands: stability (closed-form thresholds and the dispersion table),
simulate (one run into a run directory), sweep (parameter sweep into a
table), verify (recheck the hashes of a finished run directory).

Exit codes: 0 on success, 2 for configuration and validation problems
(including an infeasible weight selection), 3 for numerical failure of a
run.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__, runio
from .errors import Infeasible, NonFinite, ParseError, ValidationError
from .runio import SweepSpec, parse_config
from .spectral import SimConfig


def _load_run_config(path: str, seed: int | None) -> SimConfig:
    config = parse_config(path)
    if isinstance(config, SweepSpec):
        raise ValidationError(
            f"{path} defines a sweep; use the sweep subcommand"
        )
    if seed is not None:
        config = replace(config, seed=seed)
    return config


def _cmd_stability(args) -> int:
    config = _load_run_config(args.config, None)
    summary, table = runio.stability_report(config, pmax=args.pmax)
    sys.stdout.write(summary)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "thresholds.txt").write_text(summary)
        (out / "dispersion.tsv").write_text(table)
        print(f"wrote {out / 'thresholds.txt'} and {out / 'dispersion.tsv'}")
    else:
        sys.stdout.write(table)
    return 0


def _cmd_simulate(args) -> int:
    config = _load_run_config(args.config, args.seed)
    outdir = args.out or f"run-{runio.config_sha256(config)[:12]}"
    traj, manifest = runio.run_simulation(config, outdir, solver=args.solver)
    final = traj.final
    print(
        f"{manifest['classification']} at t = {final.t:g} "
        f"({len(traj.snapshots)} snapshots) -> {outdir}"
    )
    if args.verify:
        problems = runio.verify_run(outdir)
        if problems:
            for problem in problems:
                print(f"verify: {problem}", file=sys.stderr)
            return 2
        print("verify: all hashes match")
    return 0


def _cmd_sweep(args) -> int:
    spec = parse_config(args.config)
    if not isinstance(spec, SweepSpec):
        raise ValidationError(f"{args.config} has no [sweep] section")
    if args.seed is not None:
        spec = replace(spec, base=replace(spec.base, seed=args.seed))
    table = runio.run_sweep(spec, outdir=args.out, jobs=args.jobs)
    print(f"{spec.task} sweep over {spec.param} ({len(spec.values)} points) -> {table}")
    return 0


def _cmd_verify(args) -> int:
    problems = runio.verify_run(args.out)
    if problems:
        for problem in problems:
            print(problem, file=sys.stderr)
        return 2
    print(f"{args.out}: manifest verified")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sclerolab",
        description="Stability thresholds and simulations of a chemotaxis "
        "reaction-diffusion model of demyelination patterns.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    st = sub.add_parser("stability", help="threshold report and dispersion table")
    st.add_argument("--config", required=True)
    st.add_argument("--out", default=None, help="directory for report files")
    st.add_argument("--pmax", type=int, default=16, help="mode grid extent")
    st.set_defaults(func=_cmd_stability)

    sim = sub.add_parser("simulate", help="run one simulation into a directory")
    sim.add_argument("--config", required=True)
    sim.add_argument("--solver", choices=("spectral", "fd"), default="spectral")
    sim.add_argument("--seed", type=int, default=None, help="override the config seed")
    sim.add_argument("--out", default=None, help="run directory (default run-<hash>)")
    sim.add_argument(
        "--verify", action="store_true", help="recheck output hashes after the run"
    )
    sim.set_defaults(func=_cmd_simulate)

    sw = sub.add_parser("sweep", help="evaluate a parameter sweep")
    sw.add_argument("--config", required=True)
    sw.add_argument("--out", default=".", help="directory for the sweep table")
    sw.add_argument("--jobs", type=int, default=None, help="parallel workers")
    sw.add_argument("--seed", type=int, default=None)
    sw.set_defaults(func=_cmd_sweep)

    ver = sub.add_parser("verify", help="recompute the hashes of a run directory")
    ver.add_argument("out", help="run directory containing manifest.json")
    ver.set_defaults(func=_cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, ParseError, Infeasible) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except NonFinite as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
