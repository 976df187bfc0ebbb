"""
Command-line surface: every report as a reproducible, scriptable run.

Exit codes: 0 success, 1 runtime or validation failure, 2 usage error.
"""

import argparse
import logging
import sys
import time
from datetime import datetime
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from src import __version__
from src.config import config, setup_logging
from src.processor import ReportProcessor, geometric_grid, integer_grid
from src.reporting import build_envelope, write_csv, write_json

logger = logging.getLogger(__name__)

CSV_COMMANDS = {"resonances", "elliptic", "normalform", "evolve"}
POSITIONAL = {"validate": ("reports",)}

EVOLVE_EPILOG = """CSV columns (--format csv): t, L2, energy2, L4
  t        sample time
  L2       ||u(t)||_L2 of the complex state
  energy2  quadratic energy of (zeta, phi) recovered from u(t)
  L4       ||u(t)||_L4 by exact quadrature"""


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


SIGN_LETTERS = {"m": "-", "p": "+", "-": "-", "+": "+"}


def _signs(text: str) -> str:
    """Two signs as '-+' or, shell-friendly, 'mp'; returned in +/- form."""
    if len(text) != 2 or any(ch not in SIGN_LETTERS for ch in text):
        raise argparse.ArgumentTypeError(f"signs must be two of +, -, p, m; got {text!r}")
    return "".join(SIGN_LETTERS[ch] for ch in text)


def parse_grid(tokens: List[str]) -> List[Fraction]:
    """'lo..hi[:count]' for a geometric grid, or an explicit list of rationals."""
    if len(tokens) == 1 and ".." in tokens[0]:
        span, _, count = tokens[0].partition(":")
        lo, _, hi = span.partition("..")
        return geometric_grid(float(lo), float(hi), int(count) if count else 12)
    return [_fraction(t) for t in tokens]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: CAPWAVES_THREADS or all cores)")
    common.add_argument("--output", "-o", default=None, help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default=None, help="report format (default json)")
    common.add_argument("--config", default=None, help="path to a config.json")
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")

    parser = argparse.ArgumentParser(prog="capwaves", description="Capillary droplet wave computations")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("resonances", parents=[common], help="exact three-wave resonances")
    p.add_argument("--n-max", type=int, required=True)

    p = sub.add_parser("elliptic", parents=[common], help="integral points and uniqueness table")
    p.add_argument("--c-max", type=int, default=None)
    p.add_argument("--x-bound", type=int, default=None)

    p = sub.add_parser("kernel", parents=[common], help="solutions of a*j^2 = b*F(n)")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    p.add_argument("--n-max", type=int, default=1000)

    p = sub.add_parser("normalform", parents=[common], help="quadratic normal-form coefficients")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--kind", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--min-degree", type=int, default=2)
    p.add_argument("--b2-sign", choices=("verbatim", "conjugate"), default=None)

    p = sub.add_parser("counting", parents=[common], help="pair counts and the growth exponent")
    p.add_argument("--a-grid", nargs="+", required=True, help="lo..hi[:count] or explicit values")
    p.add_argument("--ratio-lo", type=_fraction, default=Fraction(1, 2))
    p.add_argument("--ratio-hi", type=_fraction, default=Fraction(2))
    p.add_argument("--no-ratio-window", action="store_true", help="count all pairs")

    p = sub.add_parser("smalldivisor", parents=[common], help="weighted small-divisor minimum")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--signs", type=_signs, default="--",
                   help="sign pattern: mm, mp, pm, pp (or --signs=-+ with literal signs)")
    p.add_argument("--exponent", type=float, default=None)

    p = sub.add_parser("evolve", parents=[common], help="linear flow time series",
                       epilog=EVOLVE_EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--n-max", type=int, default=16)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--init", default="zonal:2", help="zonal:k, hw:k or random:seed")
    p.add_argument("--out", dest="format", choices=("json", "csv"), help="alias of --format")
    p.add_argument("--convergence-study", action="store_true", help="RK4 error at dt, dt/2, dt/4")

    p = sub.add_parser("strichartz", parents=[common], help="Strichartz quotient experiments")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--q", type=int, default=4)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--n-max", type=int, default=32)
    p.add_argument("--seeds", type=int, nargs="+", default=[0])
    p.add_argument("--samples", type=int, default=4)

    p = sub.add_parser("sogge", parents=[common], help="Lq growth slopes of zonal and highest-weight harmonics")
    p.add_argument("--k-min", type=int, default=32)
    p.add_argument("--k-max", type=int, default=256)
    p.add_argument("--k-count", type=int, default=8)

    p = sub.add_parser("validate", parents=[common], help="re-check saved report envelopes")
    p.add_argument("reports", nargs="+")

    return parser


def _check(parser: argparse.ArgumentParser, args: argparse.Namespace):
    """Preconditions that argparse cannot express; violations are usage errors."""
    if getattr(args, "n_max", 2) is not None and getattr(args, "n_max", 2) < 2:
        parser.error(f"--n-max must be >= 2, got {args.n_max}")
    if args.format == "csv" and args.command not in CSV_COMMANDS:
        parser.error(f"{args.command} has no CSV form")
    if args.command == "elliptic":
        if args.c_max is not None and args.c_max < 1:
            parser.error("--c-max must be >= 1")
        c_max = args.c_max or config.get("elliptic", "c_max", default=50)
        if args.x_bound is not None and args.x_bound < 2 * c_max:
            parser.error(f"--x-bound must be >= 2*c_max = {2 * c_max}")
    if args.command == "evolve" and (args.t < 0 or args.dt <= 0):
        parser.error("--t must be >= 0 and --dt > 0")
    if args.command == "strichartz" and (args.T <= 0 or args.q < 2 or args.q % 2):
        parser.error("--T must be positive and --q an even integer >= 2")
    if args.command == "sogge" and not 2 <= args.k_min < args.k_max:
        parser.error("need 2 <= --k-min < --k-max")
    if args.threads is not None and args.threads < 0:
        parser.error("--threads must be >= 0")


def _parameters(args: argparse.Namespace) -> dict:
    skip = {"command", "output", "config", "log_level"}
    params = {}
    for key, value in sorted(vars(args).items()):
        if key in skip:
            continue
        if isinstance(value, Fraction):
            value = str(value)
        params[key] = value
    return params


def _run(processor: ReportProcessor, args: argparse.Namespace, output_format: str):
    """Returns (payload, csv_rows or None)."""
    command = args.command
    if command == "resonances":
        payload = processor.run_resonances(args.n_max)
        return payload, processor.resonance_rows(payload)
    if command == "elliptic":
        payload = processor.run_elliptic(args.c_max, args.x_bound)
        return payload, processor.elliptic_rows(payload)
    if command == "kernel":
        return processor.run_kernel(args.a, args.b, args.n_max), None
    if command == "normalform":
        if output_format == "csv":
            return None, processor.normalform_rows(args.n_max, args.kind, args.min_degree, args.b2_sign)
        return processor.run_normalform(args.n_max, args.kind, args.min_degree, args.b2_sign), None
    if command == "counting":
        grid = parse_grid(args.a_grid)
        if args.no_ratio_window:
            return processor.run_counting(grid, Fraction(0), None), None
        return processor.run_counting(grid, args.ratio_lo, args.ratio_hi), None
    if command == "smalldivisor":
        return processor.run_smalldivisor(args.n_max, tuple(args.signs), args.exponent), None
    if command == "evolve":
        payload = processor.run_evolve(args.n_max, args.t, args.dt, args.init, args.convergence_study)
        return payload, processor.evolve_rows(payload)
    if command == "strichartz":
        return processor.run_strichartz(args.s, args.q, args.T, args.n_max, args.seeds, args.samples), None
    if command == "sogge":
        return processor.run_sogge(integer_grid(args.k_min, args.k_max, args.k_count)), None
    if command == "validate":
        payload = processor.run_validate(args.reports)
        return payload, None
    raise ValueError(f"unknown command {command!r}")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _check(parser, args)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 0

    if args.config:
        config.config_file = Path(args.config).absolute()
        config.load_config()
    setup_logging(args.log_level)
    output_format = args.format or config.get("output", "format", default="json")

    started_at = datetime.now()
    start = time.perf_counter()
    try:
        processor = ReportProcessor(args.threads)
        payload, rows = _run(processor, args, output_format)
        if output_format == "csv" and rows is not None:
            # rows may be a generator, so failures can surface while writing
            write_csv(rows, args.output)
        else:
            elapsed = time.perf_counter() - start
            envelope = build_envelope(args.command, _parameters(args), payload, started_at, elapsed,
                                      positional=POSITIONAL.get(args.command, ()))
            write_json(envelope, args.output, config.get("output", "indent", default=2))
    except (ValueError, RuntimeError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 1

    if args.command == "elliptic":
        print(f"note: {payload['completeness']}", file=sys.stderr)
    if args.command == "validate" and payload["summary"]["invalid"]:
        return 1
    return 0
