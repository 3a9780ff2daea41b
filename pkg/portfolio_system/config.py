"""
Configuration for the portfolio constructor.
Numeric tolerances, option enums and the RunConfig consumed by the CLI.
"""
import os
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from portfolio_system.errors import ConfigError
from utils.logger import get_logger

logger = get_logger("Config")

# Numeric tolerances
BUDGET_TOLERANCE = 1e-10          # |sum(w) - 1|
PARAMETER_SYMMETRY_TOLERANCE = 1e-9   # relative to largest |entry|
MOMENT_SYMMETRY_TOLERANCE = 1e-12
PIVOT_TOLERANCE = 1e-12           # relative to largest |entry| of the equilibrated system
CONDITION_LIMIT = 1e12
NORMALIZATION_TOLERANCE = 1e-12
VARIANCE_CLAMP = 1e-12

# Enumeration limits
DEFAULT_ENUMERATION_CAP = 20
ENUMERATION_OVERFLOW_LIMIT = 62

WORKERS_ENV = "PORTFOLIO_WORKERS"


class ReturnsKind(Enum):
    """How per-period returns are derived from prices."""
    SIMPLE = "simple"
    LOG = "log"


class CovarianceDivisor(Enum):
    """Divisor used for the covariance estimate."""
    SAMPLE = "sample"          # m - 1
    POPULATION = "population"  # m


class OutputFormat(Enum):
    """Report rendering formats."""
    TABLE = "table"
    CSV = "csv"
    JSON = "json"


class MethodChoice(Enum):
    """Which optimization criteria to run."""
    MV = "mv"
    MRAR = "mrar"
    BOTH = "both"


def default_workers() -> int:
    """Worker count for subset solves, from PORTFOLIO_WORKERS (default 1)."""
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        workers = int(raw)
    except ValueError:
        logger.warning(f"Ignoring {WORKERS_ENV}={raw!r}: not an integer, using 1 worker")
        return 1
    if workers < 1:
        logger.warning(f"Ignoring {WORKERS_ENV}={raw!r}: must be at least 1, using 1 worker")
        return 1
    return workers


@dataclass
class RunConfig:
    """All options of a command-line run."""
    input_path: Optional[str] = None
    params_path: Optional[str] = None
    sample: bool = False
    label_column: bool = False
    method: MethodChoice = MethodChoice.BOTH
    enumerate: bool = False
    top_k: Optional[int] = None  # None means all
    output_format: OutputFormat = OutputFormat.TABLE
    trace: bool = False
    returns_kind: ReturnsKind = ReturnsKind.SIMPLE
    cov_divisor: CovarianceDivisor = CovarianceDivisor.SAMPLE
    enumeration_cap_override: Optional[int] = None
    workers: int = 1

    @property
    def enumeration_cap(self) -> int:
        if self.enumeration_cap_override is not None:
            return self.enumeration_cap_override
        return DEFAULT_ENUMERATION_CAP

    def validate(self) -> None:
        """Raise ConfigError unless exactly one input source is set and counts are positive."""
        sources = [self.input_path is not None, self.params_path is not None, self.sample]
        if sum(sources) != 1:
            raise ConfigError("exactly one of --input, --params or --sample is required")
        if self.params_path is not None and self.label_column:
            raise ConfigError("--label-column only applies to --input price files")
        if self.top_k is not None and self.top_k < 1:
            raise ConfigError(f"--top must be at least 1, got {self.top_k}")
        if self.enumeration_cap_override is not None and self.enumeration_cap_override < 2:
            raise ConfigError(f"--max-assets must be at least 2, got {self.enumeration_cap_override}")
        if self.workers < 1:
            raise ConfigError(f"--workers must be at least 1, got {self.workers}")
