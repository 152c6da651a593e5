"""Command line entry point.

    nhflip run fig2 --out runs/fig2
    nhflip run --config my.toml --out runs/my --dt 0.005
    nhflip sweep --preset fig2 --param T --values 50,100,200 --workers 3
    nhflip preset fig4 > fig4.toml

Exit codes: 0 success, 2 validation error, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .errors import NumericalError, ValidationError
from .experiment import PRESETS, dump_experiment, get_preset, load_experiment
from .export import fmt
from .runner import SWEEP_PARAMETERS, run_config, run_preset, sweep

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4


def _values(text: str) -> list[float]:
    text = text.strip()
    if not text:
        return []
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nhflip", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a preset or a config file")
    run.add_argument("preset", nargs="?", help=f"one of: {', '.join(PRESETS)}")
    run.add_argument("--config", help="TOML config file")
    run.add_argument("--out", default=None, help="output directory (default: runs/<name>)")
    run.add_argument("--dt", type=float, default=None)
    run.add_argument("--tmax", type=float, default=None)

    sw = sub.add_parser("sweep", help="repeat a run over values of one parameter")
    src = sw.add_mutually_exclusive_group(required=True)
    src.add_argument("--config")
    src.add_argument("--preset")
    sw.add_argument("--param", required=True, choices=SWEEP_PARAMETERS)
    sw.add_argument("--values", required=True, type=_values)
    sw.add_argument("--workers", type=int, default=1)
    sw.add_argument("--model", choices=("full", "reduced"), default="full")
    sw.add_argument("--out", default=None)

    show = sub.add_parser("preset", help="print a preset as a config file")
    show.add_argument("name")
    return parser


def _print_verdict(verdict: dict) -> None:
    for key, value in verdict.items():
        print(f"{key}: {fmt(value)}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            if (args.preset is None) == (args.config is None):
                raise ValidationError("give exactly one of a preset name or --config FILE")
            if args.config:
                out = args.out or "runs/config"
                result = run_config(args.config, out, dt=args.dt, t_max=args.tmax)
            else:
                out = args.out or f"runs/{args.preset}"
                result = run_preset(args.preset, out, dt=args.dt, t_max=args.tmax)
            _print_verdict(result.verdict)
            print(f"outputs: {out}")
        elif args.command == "sweep":
            exp = load_experiment(args.config) if args.config else get_preset(args.preset)
            out = args.out or f"runs/{exp.name}-sweep-{args.param}"
            rows = sweep(exp, args.param, args.values, out, workers=args.workers, model=args.model)
            print("parameter,value,metric,result")
            for r in rows:
                print(f"{r['parameter']},{fmt(r['value'])},{r['metric']},{fmt(r['result'])}")
        elif args.command == "preset":
            sys.stdout.write(dump_experiment(get_preset(args.name)))
    except ValidationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
