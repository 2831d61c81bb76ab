"""Command line interface: ``crindep test | power | cif``.

Reports and tables go to stdout (or ``--out``); logging goes to stderr.
The exit status is 0 when the computation succeeded, whatever the
statistical decision, and 2 on any input or computation error.
"""

import argparse
import dataclasses
import logging
import sys
from typing import List, Optional, Sequence

import pandas as pd

from . import __version__
from .asymptotics import asymptotic_test
from .config import DEFAULT_ALPHAS, DEFAULT_PI1, TEST_BOOTSTRAP_B, default_seed, get_scale_preset, parse_seed
from .errors import CrindepError
from .io import (
    IngestionPolicy,
    parse_cause_map,
    read_csv,
    write_cif_csv,
    write_power_table,
)
from .models import DiscreteWeibull, Geometric, LifetimeModel
from .power import DEFAULT_A_GRID, DEFAULT_N_GRID, PowerStudyConfig, power_study, power_table_wide
from .resampling import BootstrapConfig, independence_test
from .sample import cif_table, hazard_share_table

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 2


def _float_list(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'") from None


def _int_list(text: str) -> List[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'") from None


def _seed(text: str) -> int:
    try:
        return parse_seed(text)
    except CrindepError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=_seed, default=None,
                        help="master seed (default: $CRINDEP_SEED or built-in)")
    parser.add_argument("--out", default=None, help="output file (default: stdout)")
    parser.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        help="logging level on stderr")


def _add_ingestion(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True, help="CSV file with a header row")
    parser.add_argument("--time-column", default="time")
    parser.add_argument("--cause-column", default="cause")
    parser.add_argument("--status-column", default=None,
                        help="column flagging censored rows")
    parser.add_argument("--censored-value", action="append", default=None,
                        help="cell value marking a censored row (repeatable, default 0)")
    parser.add_argument("--censor", choices=["extra_cause", "drop"], default="extra_cause",
                        help="censored rows become cause k+1 or are dropped")
    parser.add_argument("--cause-map", default=None,
                        help="text labels to causes, e.g. 'cancer=1,other=2'")
    parser.add_argument("--k", type=int, default=None,
                        help="declared number of causes before censoring")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crindep",
        description="Test independence of failure time and cause in discrete competing risks data.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    test = commands.add_parser("test", help="bootstrap independence test on a CSV file")
    _add_ingestion(test)
    test.add_argument("--B", type=int, default=TEST_BOOTSTRAP_B, help="bootstrap replicates")
    test.add_argument("--alpha", type=float, action="append", default=None,
                      help="significance level (repeatable, default 0.05 and 0.01)")
    test.add_argument("--scheme", choices=["uniform", "empirical"], default="uniform",
                      help="distribution of bootstrap causes")
    test.add_argument("--asymptotic", action="store_true",
                      help="attach the experimental asymptotic z-test")
    test.add_argument("--asymptotic-variance", choices=["plugin", "jackknife"],
                      default="plugin")
    _add_common(test)

    power = commands.add_parser("power", help="Monte Carlo power study")
    power.add_argument("--model", choices=["geometric", "weibull"], default="geometric")
    power.add_argument("--p", type=_float_list, default=[0.3],
                       help="comma-separated values of p")
    power.add_argument("--beta", type=_float_list, default=[1.0],
                       help="comma-separated Weibull shapes")
    power.add_argument("--a-grid", type=_float_list, default=list(DEFAULT_A_GRID))
    power.add_argument("--n-grid", type=_int_list, default=list(DEFAULT_N_GRID))
    power.add_argument("--alpha", type=float, action="append", default=None)
    power.add_argument("--preset", choices=["desk", "full"], default="desk",
                       help="scale of reps and B unless given explicitly")
    power.add_argument("--reps", type=int, default=None)
    power.add_argument("--B", type=int, default=None)
    power.add_argument("--pi1", type=float, default=DEFAULT_PI1)
    power.add_argument("--null-method", choices=["family", "bootstrap"], default="family")
    power.add_argument("--n-jobs", type=int, default=1)
    power.add_argument("--format", choices=["csv", "json"], default="csv")
    power.add_argument("--wide", action="store_true",
                       help="rows a x n, columns model x alpha")
    _add_common(power)

    cif = commands.add_parser("cif", help="cumulative incidence functions as CSV")
    _add_ingestion(cif)
    cif.add_argument("--hazards", action="store_true",
                     help="append each cause's share of the overall hazard")
    _add_common(cif)
    return parser


def _policy(args, min_causes: int) -> IngestionPolicy:
    return IngestionPolicy(
        time_column=args.time_column,
        cause_column=args.cause_column,
        status_column=args.status_column,
        censored_values=tuple(args.censored_value or ("0",)),
        censor_policy=args.censor,
        cause_label_map=parse_cause_map(args.cause_map) if args.cause_map else None,
        k=args.k,
        min_causes=min_causes,
    )


def _write_text(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)


def cmd_test(args) -> int:
    sample = read_csv(args.input, _policy(args, min_causes=2))
    config = BootstrapConfig(
        B=args.B,
        alpha_levels=tuple(args.alpha or DEFAULT_ALPHAS),
        cause_scheme=args.scheme,
        seed=args.seed if args.seed is not None else default_seed(),
    )
    report = independence_test(sample, config)
    if args.asymptotic:
        attached = {}
        for alpha in config.alpha_levels:
            try:
                result = asymptotic_test(sample, alpha, variance=args.asymptotic_variance)
                attached[f"{alpha:g}"] = result.to_dict()
            except CrindepError as exc:
                logger.warning("asymptotic test at alpha=%g: %s", alpha, exc)
                attached[f"{alpha:g}"] = {"error": str(exc), "type": exc.__class__.__name__}
        report = dataclasses.replace(report, asymptotic=attached)
    _write_text(report.to_json() + "\n", args.out)
    return EXIT_OK


def _models(args) -> List[LifetimeModel]:
    if args.model == "geometric":
        return [Geometric(p) for p in args.p]
    return [DiscreteWeibull(p, beta) for p in args.p for beta in args.beta]


def cmd_power(args) -> int:
    scale = get_scale_preset(args.preset)
    config = PowerStudyConfig(
        models=tuple(_models(args)),
        a_grid=tuple(args.a_grid),
        n_grid=tuple(args.n_grid),
        alphas=tuple(args.alpha or DEFAULT_ALPHAS),
        reps=args.reps if args.reps is not None else scale["reps"],
        B=args.B if args.B is not None else scale["B"],
        pi=(args.pi1,),
        seed=args.seed if args.seed is not None else default_seed(),
        null_method=args.null_method,
        n_jobs=args.n_jobs,
    )
    table = power_study(config)
    if args.wide:
        table = power_table_wide(table)
    write_power_table(table, args.out if args.out is not None else sys.stdout, args.format)
    return EXIT_OK


def cmd_cif(args) -> int:
    sample = read_csv(args.input, _policy(args, min_causes=1))
    table = cif_table(sample)
    if args.hazards:
        table = pd.merge(table, hazard_share_table(sample), on="t")
    write_cif_csv(table, args.out if args.out is not None else sys.stdout)
    return EXIT_OK


COMMANDS = {
    "test": cmd_test,
    "power": cmd_power,
    "cif": cmd_cif,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point of the ``crindep`` command."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args)
    except (CrindepError, OSError) as exc:
        print(f"crindep: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
