"""
Command-line entry point for the optimal portfolio constructor.

Orchestrates ingestion -> moments -> solve or enumerate -> report. The report
goes to standard output; diagnostics, progress and the optional trace go to
standard error.
"""
import sys
import argparse
from typing import List, Optional, TextIO, Tuple

from portfolio_system import create_portfolio_system
from portfolio_system.config import (
    CovarianceDivisor, MethodChoice, OutputFormat, ReturnsKind, RunConfig, default_workers
)
from portfolio_system.errors import ConfigError, InputError, PortfolioError
from portfolio_system.market_data import load_parameter_file, load_price_file, load_sample_prices
from portfolio_system.moment_estimation import AssetStats, MomentEstimate
from portfolio_system.portfolio_enumeration import (
    METHODS_FOR_CHOICE, rank_portfolios, single_portfolio_report
)
from reporting import build_trace, emit_trace, render_report, select_records
from utils.logger import get_logger

logger = get_logger("CLI")


class _ArgumentParser(argparse.ArgumentParser):
    """Reports usage errors as ConfigError (exit 3) instead of exiting with 2."""

    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        description="Construct minimum variance and maximum risk adjusted return portfolios."
    )
    parser.add_argument("--input", metavar="PATH", help="Price CSV file (header row of asset names)")
    parser.add_argument("--params", metavar="PATH",
                        help="Parameter document with assets, means and covariance")
    parser.add_argument("--sample", action="store_true", help="Use the bundled sample dataset")
    parser.add_argument("--label-column", action="store_true",
                        help="First CSV column holds period labels")
    parser.add_argument("--method", choices=[m.value for m in MethodChoice], default="both",
                        help="Optimization criteria (default: both)")
    parser.add_argument("--enumerate", action="store_true",
                        help="Solve every subset of at least two assets and rank them")
    parser.add_argument("--top", type=int, metavar="K", help="Only report the K best portfolios")
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], default="table",
                        help="Report format (default: table)")
    parser.add_argument("--trace", action="store_true",
                        help="Write step-by-step calculations to standard error")
    parser.add_argument("--returns", choices=[r.value for r in ReturnsKind], default="simple",
                        help="Return definition (default: simple)")
    parser.add_argument("--cov", choices=[c.value for c in CovarianceDivisor], default="sample",
                        help="Covariance divisor (default: sample, m - 1)")
    parser.add_argument("--max-assets", type=int, metavar="N",
                        help="Override the enumeration cap of 20 assets")
    parser.add_argument("--workers", type=int, default=None, metavar="N",
                        help="Threads for subset solves (default: PORTFOLIO_WORKERS or 1)")
    return parser


def parse_args(argv: Optional[List[str]] = None) -> RunConfig:
    """Parse command-line flags into a validated RunConfig."""
    args = build_parser().parse_args(argv)
    config = RunConfig(
        input_path=args.input,
        params_path=args.params,
        sample=args.sample,
        label_column=args.label_column,
        method=MethodChoice(args.method),
        enumerate=args.enumerate,
        top_k=args.top,
        output_format=OutputFormat(args.format),
        trace=args.trace,
        returns_kind=ReturnsKind(args.returns),
        cov_divisor=CovarianceDivisor(args.cov),
        enumeration_cap_override=args.max_assets,
        workers=args.workers if args.workers is not None else default_workers()
    )
    config.validate()
    return config


def _source_name(config: RunConfig) -> str:
    return config.input_path or config.params_path or "sample data"


def load_moments(config: RunConfig) -> Tuple[MomentEstimate, List[AssetStats]]:
    """Read the configured input source and estimate (or adopt) the moments."""
    if config.params_path is not None:
        return create_portfolio_system(params=load_parameter_file(config.params_path))

    if config.sample:
        prices = load_sample_prices()
    else:
        prices = load_price_file(config.input_path, config.label_column)
    return create_portfolio_system(
        prices=prices, returns_kind=config.returns_kind, divisor=config.cov_divisor
    )


def run(config: RunConfig, stdout: TextIO = None, stderr: TextIO = None) -> int:
    """
    Execute one run.
    Returns:
        0 on success, 1 for input errors, 2 for numerical failures, 3 for invalid options
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    methods = METHODS_FOR_CHOICE[config.method]

    try:
        config.validate()
        # Load inputs
        try:
            moments, stats = load_moments(config)
        except InputError as e:
            raise InputError(f"{_source_name(config)}: {e}") from e

        # Construct portfolios
        if config.enumerate:
            report = rank_portfolios(moments, methods, cap=config.enumeration_cap,
                                     workers=config.workers)
        else:
            report = single_portfolio_report(moments, methods)

        # Render
        output = render_report(report, stats, config.output_format, config.top_k)
        if config.trace:
            records = select_records(report, config.top_k)
            stderr.write(emit_trace(build_trace(records, moments, methods)))
            stderr.flush()
    except PortfolioError as e:
        logger.error(f"{type(e).__name__}: {e}")
        stderr.write(f"error: {e}\n")
        return e.exit_code

    stdout.write(output)
    stdout.flush()
    return 0


def main(argv: Optional[List[str]] = None, stdout: TextIO = None, stderr: TextIO = None) -> int:
    stderr = stderr or sys.stderr
    try:
        config = parse_args(argv)
    except ConfigError as e:
        stderr.write(f"error: {e}\n")
        return e.exit_code
    return run(config, stdout, stderr)


if __name__ == "__main__":
    sys.exit(main())
