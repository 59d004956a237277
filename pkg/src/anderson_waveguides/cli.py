"""Command-line entry point.

Exit codes: 0 success, 1 configuration error, 2 I/O error,
3 numerical-invariant violation.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .checks import format_table, run_checks
from .experiment import (
    ArchiveError,
    ConfigError,
    ExperimentConfig,
    InvariantViolation,
    RealizationArchive,
    read_wigner_csv,
    run_experiment,
    wigner_pipeline,
    write_pnd_csv,
    write_wigner_csv,
    write_wigner_matrix,
)
from .phase_space import GridSpec, pnd
from .states import UnsupportedState, fock_vector, parse_state

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _names(text: str) -> tuple[str, ...]:
    # state strings contain commas themselves, so the list separator is ';'
    return tuple(s.strip() for s in text.split(";") if s.strip())


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="anderson-waveguides",
                                description="Quantum light in disordered coupled-waveguide arrays.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a disorder-ensemble experiment")
    run.add_argument("--config", type=Path, help="JSON file of ExperimentConfig keys")
    run.add_argument("--name")
    run.add_argument("--guides", dest="guide_count", type=int)
    run.add_argument("--injection", dest="injection_index", type=int)
    run.add_argument("--coupling", type=float)
    run.add_argument("--dz", type=float)
    run.add_argument("--delta", dest="delta_over_c", type=_floats, help="e.g. 0,1,5")
    run.add_argument("--z", dest="z_checkpoints", type=_floats, help="e.g. 5,20")
    run.add_argument("--realizations", type=int)
    run.add_argument("--seed", dest="master_seed", type=int)
    run.add_argument("--states", type=_names, help="';'-separated, e.g. 'ccs1;rbs:0,20'")
    run.add_argument("--out", dest="output_dir")
    run.add_argument("--capture-cross", action="store_const", const=True, default=None)
    run.add_argument("--archive", choices=("none", "injection", "full"))
    run.add_argument("--gnuplot", action="store_const", const=True, default=None)
    run.add_argument("--workers", type=int)

    wig = sub.add_parser("wigner", help="disorder-averaged Wigner function and PND from an archive")
    wig.add_argument("--archive", type=Path, required=True)
    wig.add_argument("--state", required=True)
    wig.add_argument("--delta", type=float, required=True)
    wig.add_argument("--z", type=float, required=True)
    wig.add_argument("--step", type=float, default=0.1)
    wig.add_argument("--n-max", type=int)
    wig.add_argument("--out", type=Path, default=Path("."))
    wig.add_argument("--name", default="wigner")

    pn = sub.add_parser("pnd", help="photon-number distribution from a Wigner grid CSV")
    pn.add_argument("--grid", type=Path, required=True)
    pn.add_argument("--n-max", type=int, required=True)
    pn.add_argument("--out", type=Path, required=True)

    sub.add_parser("oracle-check", help="run the analytic-oracle batteries")
    return p


def _cmd_run(args) -> int:
    overrides = {k: getattr(args, k) for k in (
        "name", "guide_count", "injection_index", "coupling", "dz", "delta_over_c",
        "z_checkpoints", "realizations", "master_seed", "states", "output_dir",
        "capture_cross", "archive", "gnuplot", "workers")}
    if args.config:
        cfg = ExperimentConfig.from_file(args.config, **overrides)
    else:
        cfg = ExperimentConfig.from_dict({}, **overrides)
    result = run_experiment(cfg)
    for path in result.files:
        print(path)
    return EXIT_OK


def _cmd_wigner(args) -> int:
    archive = RealizationArchive.load(args.archive)
    state = parse_state(args.state)
    vec = fock_vector(state)
    grid = GridSpec.covering(vec.truncation, step=args.step)
    out = wigner_pipeline(archive, state, args.delta, args.z, grid, args.n_max)
    args.out.mkdir(parents=True, exist_ok=True)
    for path in (write_wigner_csv(args.out / f"{args.name}_wigner.csv", out.grid),
                 write_wigner_matrix(args.out / f"{args.name}_wigner.dat", out.grid),
                 write_pnd_csv(args.out / f"{args.name}_pnd.csv", out.pnd)):
        print(path)
    print(f"integral={out.grid.integral():.6f} pnd_raw_total={out.pnd.raw_total:.6f}")
    if out.pnd.flagged:
        print("PND quadrature failure: negative probabilities", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _cmd_pnd(args) -> int:
    grid = read_wigner_csv(args.grid)
    result = pnd(grid, args.n_max)
    print(write_pnd_csv(args.out, result))
    if result.flagged:
        print("PND quadrature failure: negative probabilities", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _cmd_oracle(args) -> int:
    results = run_checks()
    print(format_table(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERIC


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": _cmd_run, "wigner": _cmd_wigner, "pnd": _cmd_pnd,
               "oracle-check": _cmd_oracle}[args.command]
    try:
        return handler(args)
    except (ConfigError, UnsupportedState, ArchiveError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InvariantViolation, ArithmeticError) as exc:
        print(f"numerical invariant violated: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
