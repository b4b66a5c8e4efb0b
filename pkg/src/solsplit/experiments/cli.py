"""Command-line interface: run experiments and evaluate predictions.

Runner subcommands (snapshot, sweep, scaling, resolve, linear) read a
config file and write CSVs, a manifest, and optional SVGs into the
output directory.  Evaluator subcommands (phi0, zs, predict) take direct
flags and print a single CSV line.  Exit codes: 0 success, 1 config
error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .. import __version__
from ..errors import ConfigError, LocalizationError, StabilityError
from ..theory import outgoing_prediction, phi0, zs_scattering_data
from .config import parse_config
from .runs import (
    run_linear_probe,
    run_resolution,
    run_scaling_study,
    run_snapshot,
    run_transmission_sweep,
)

__all__ = ["main"]

_KIND_BY_COMMAND = {
    "snapshot": "snapshot",
    "sweep": "sweep",
    "scaling": "scaling",
    "resolve": "resolution",
    "linear": "linear_probe",
}


class _Parser(argparse.ArgumentParser):
    """Argument parser that reports usage problems as config errors."""

    def error(self, message: str) -> None:
        raise ConfigError(message)


def _fmt(value: float | None) -> str:
    if value is None:
        return "nan"
    return "%.15g" % value


def _build_parser() -> _Parser:
    parser = _Parser(prog="solsplit", description=__doc__)
    parser.add_argument("--version", action="version", version=f"solsplit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("snapshot", "evolve one launch and write the requested frames"),
        ("sweep", "measure transmission over an (alpha, v) grid"),
        ("scaling", "measure transmission residuals against velocity"),
        ("resolve", "fit both outgoing solitons against the prediction"),
        ("linear", "measure the linear splitting error against velocity"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="experiment config file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--plot", action="store_true", help="also render SVG figures")
        p.add_argument("--jobs", type=int, default=1, help="worker threads for sweeps")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")

    p = sub.add_parser("phi0", help="evaluate the asymptotic phase integral")
    p.add_argument("--omega", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-10)

    p = sub.add_parser("zs", help="evaluate sech-profile scattering data")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)

    p = sub.add_parser("predict", help="predict the outgoing soliton parameters")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--v", type=float, required=True)
    p.add_argument("--x0", type=float, required=True)

    return parser


def _load_config(args: argparse.Namespace):
    config = parse_config(args.config)
    expected = _KIND_BY_COMMAND[args.command]
    if config.kind != expected:
        raise ConfigError(
            f"config kind {config.kind!r} does not match subcommand "
            f"{args.command!r} (expected {expected!r})"
        )
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    out_dir = args.out if args.out is not None else (config.out_dir or ".")
    return config, out_dir


def _run_command(args: argparse.Namespace) -> None:
    if args.command == "phi0":
        value = phi0(args.omega, tol=args.tol)
        print(f"{_fmt(args.omega)},{_fmt(value)}")
        return
    if args.command == "zs":
        data = zs_scattering_data(args.alpha, args.lam)
        cells = (
            args.alpha,
            args.lam,
            data.a.real,
            data.a.imag,
            data.b.real,
            data.b.imag,
            data.r.real,
            data.r.imag,
        )
        print(",".join(_fmt(c) for c in cells))
        return
    if args.command == "predict":
        pred = outgoing_prediction(args.q, args.v, args.x0)
        cells = (args.q, args.v, args.x0, pred.A_T, pred.A_R, pred.phi_T, pred.phi_R)
        print(",".join(_fmt(c) for c in cells))
        return

    config, out_dir = _load_config(args)
    if args.command == "snapshot":
        result = run_snapshot(config, out_dir, plot=args.plot)
        for path in result.frame_paths:
            print(f"wrote {path}")
        print(f"wrote {result.conserved_path}")
    elif args.command == "sweep":
        records = run_transmission_sweep(config, out_dir, jobs=args.jobs, plot=args.plot)
        for r in records:
            print(
                f"alpha={r.alpha:g} v={r.v:g} T_sim={_fmt(r.T_sim)} "
                f"T_theory={_fmt(r.T_theory)} window={str(r.window).lower()} {r.status}"
            )
    elif args.command == "scaling":
        result = run_scaling_study(config, out_dir, jobs=args.jobs, plot=args.plot)
        for r in result.records:
            print(f"v={r.v:g} residual={_fmt(r.residual)} window={str(r.window).lower()} {r.status}")
        print(f"slope={'none' if result.slope is None else _fmt(result.slope)}")
    elif args.command == "resolve":
        report = run_resolution(config, out_dir, plot=args.plot)
        for channel in (report.transmitted, report.reflected):
            if channel.fitted is None:
                print(
                    f"{channel.name}: {channel.status} window_mass={_fmt(channel.window_mass)}"
                )
            else:
                print(
                    f"{channel.name}: A={_fmt(channel.fitted.amplitude)} "
                    f"(predicted {_fmt(channel.predicted_amplitude)}) "
                    f"phase_residual={_fmt(channel.phase_residual)}"
                )
        print(f"radiation_mass={_fmt(report.radiation_mass)}")
    else:
        result = run_linear_probe(config, out_dir, jobs=args.jobs, plot=args.plot)
        for r in result.records:
            print(f"v={r.v:g} residual={_fmt(r.residual)} {r.status}")
        print(f"slope={'none' if result.slope is None else _fmt(result.slope)}")


def main(argv: list[str] | None = None) -> int:
    """Entry point; returns the process exit code."""
    if argv is None:
        argv = sys.argv[1:]
    try:
        args = _build_parser().parse_args(argv)
        _run_command(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (LocalizationError, StabilityError, FloatingPointError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
