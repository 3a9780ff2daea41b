"""
Market data ingestion for the portfolio constructor.
This module parses price tables and parameter files and converts prices
to per-period returns.
"""
import io
import csv
import json
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from portfolio_system.config import PARAMETER_SYMMETRY_TOLERANCE, ReturnsKind
from portfolio_system.errors import (
    AsymmetricCovariance, DimensionMismatch, DuplicateAssetName, EmptyInput,
    InputError, MalformedDocument, NegativeVariance, NonNumericCell,
    NonPositivePrice, RaggedRows, TooFewRows
)
from utils.logger import get_logger

logger = get_logger("MarketData")

SAMPLE_DATA_PATH = Path(__file__).parent / "data" / "sample_prices.csv"
PARAMETER_FIELDS = ("assets", "means", "covariance")
MIN_PRICE_ROWS = 3

# Integer, decimal or scientific notation; no thousands or locale separators.
_NUMBER_PATTERN = re.compile(r"^[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?$")


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


def _validate_asset_names(names: Sequence[str]) -> Tuple[str, ...]:
    names = tuple(names)
    seen = set()
    for name in names:
        if not name:
            raise DuplicateAssetName("asset names must be non-empty")
        if name in seen:
            raise DuplicateAssetName(f"duplicate asset name {name!r}")
        seen.add(name)
    return names


@dataclass(frozen=True, eq=False)
class PriceTable:
    """Named asset price series on a common time grid."""
    asset_names: Tuple[str, ...]
    prices: np.ndarray  # T x n
    period_labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "asset_names", _validate_asset_names(self.asset_names))
        prices = _readonly(self.prices)
        object.__setattr__(self, "prices", prices)

        if prices.ndim != 2 or prices.shape[1] != len(self.asset_names):
            raise DimensionMismatch(
                f"price matrix shape {prices.shape} does not match {len(self.asset_names)} assets"
            )
        if len(self.asset_names) < 1:
            raise EmptyInput("price table has no asset columns")
        if prices.shape[0] < MIN_PRICE_ROWS:
            raise TooFewRows(f"need at least {MIN_PRICE_ROWS} price rows, got {prices.shape[0]}")
        if not np.all(np.isfinite(prices)) or np.any(prices <= 0):
            row, col = np.argwhere(~(np.isfinite(prices) & (prices > 0)))[0]
            raise NonPositivePrice(int(row) + 1, self.asset_names[col], float(prices[row, col]))
        if self.period_labels is not None:
            labels = tuple(self.period_labels)
            if len(labels) != prices.shape[0]:
                raise DimensionMismatch(
                    f"{len(labels)} period labels for {prices.shape[0]} price rows"
                )
            object.__setattr__(self, "period_labels", labels)

    @property
    def n_assets(self) -> int:
        return len(self.asset_names)

    @property
    def n_periods(self) -> int:
        return self.prices.shape[0]

    def to_frame(self) -> pd.DataFrame:
        """Return the prices as a DataFrame indexed by period label (or position)."""
        index = list(self.period_labels) if self.period_labels is not None else None
        return pd.DataFrame(np.array(self.prices), columns=list(self.asset_names), index=index)

    def to_csv_text(self) -> str:
        """Render the table in the format parse_price_table reads."""
        frame = self.to_frame()
        if self.period_labels is not None:
            frame.insert(0, "Period", list(self.period_labels))
        return frame.to_csv(index=False)

    def equals(self, other: "PriceTable", tolerance: float = 1e-12) -> bool:
        """Value equality within tolerance."""
        return (
            self.asset_names == other.asset_names
            and self.period_labels == other.period_labels
            and self.prices.shape == other.prices.shape
            and bool(np.allclose(self.prices, other.prices, rtol=tolerance, atol=0.0))
        )


@dataclass(frozen=True, eq=False)
class ReturnMatrix:
    """Per-period rates of return, one row fewer than the source prices."""
    asset_names: Tuple[str, ...]
    returns: np.ndarray  # (T-1) x n
    kind: ReturnsKind = ReturnsKind.SIMPLE

    def __post_init__(self):
        object.__setattr__(self, "asset_names", tuple(self.asset_names))
        returns = _readonly(self.returns)
        object.__setattr__(self, "returns", returns)
        if returns.ndim != 2 or returns.shape[1] != len(self.asset_names):
            raise DimensionMismatch(
                f"return matrix shape {returns.shape} does not match {len(self.asset_names)} assets"
            )
        if not np.all(np.isfinite(returns)):
            raise InputError("returns must be finite")
        if self.kind == ReturnsKind.SIMPLE and np.any(returns <= -1.0):
            raise InputError("simple returns must exceed -1")

    @property
    def n_observations(self) -> int:
        return self.returns.shape[0]


@dataclass(frozen=True, eq=False)
class ParameterSet:
    """Directly supplied mean returns and covariance matrix."""
    asset_names: Tuple[str, ...]
    means: np.ndarray
    covariance: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "asset_names", _validate_asset_names(self.asset_names))
        means = _readonly(self.means)
        covariance = _readonly(self.covariance)
        n = len(self.asset_names)
        if means.shape != (n,):
            raise DimensionMismatch(f"expected {n} means, got shape {means.shape}")
        if covariance.shape != (n, n):
            raise DimensionMismatch(f"expected a {n}x{n} covariance, got shape {covariance.shape}")
        if not (np.all(np.isfinite(means)) and np.all(np.isfinite(covariance))):
            raise MalformedDocument("means and covariance must be finite")
        scale = float(np.max(np.abs(covariance))) if covariance.size else 0.0
        if np.max(np.abs(covariance - covariance.T), initial=0.0) > PARAMETER_SYMMETRY_TOLERANCE * scale:
            raise AsymmetricCovariance("covariance matrix is not symmetric")
        if np.any(np.diag(covariance) < 0):
            raise NegativeVariance("covariance diagonal must be non-negative")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "covariance", covariance)


def _parse_number(cell: str) -> Optional[float]:
    cell = cell.strip()
    if not _NUMBER_PATTERN.match(cell):
        return None
    return float(cell)


def parse_price_table(text: str, has_label_column: bool = False) -> PriceTable:
    """
    Parse a comma-delimited price table with a header row of asset names.
    Args:
        text: CSV text, header first
        has_label_column: the first column holds period labels and is not an asset
    Returns:
        A validated PriceTable with column order preserved
    """
    text = text.lstrip("\ufeff")
    reader = csv.reader(io.StringIO(text))

    header: Optional[List[str]] = None
    body: List[Tuple[int, List[str]]] = []
    for row in reader:
        if not row:
            continue
        if header is None:
            header = [cell.strip() for cell in row]
        else:
            body.append((reader.line_num, row))

    if header is None:
        raise EmptyInput("price table is empty")

    names = header[1:] if has_label_column else header
    if not names:
        raise EmptyInput("price table has no asset columns")
    names = _validate_asset_names(names)
    if not body:
        raise EmptyInput("price table has no data rows")

    offset = 1 if has_label_column else 0
    labels: List[str] = []
    prices = np.empty((len(body), len(names)))
    for r, (line, row) in enumerate(body):
        if len(row) != len(header):
            raise RaggedRows(line, len(header), len(row))
        if has_label_column:
            labels.append(row[0].strip())
        for c, name in enumerate(names):
            cell = row[c + offset]
            value = _parse_number(cell)
            if value is None:
                raise NonNumericCell(line, name, cell)
            if not (math.isfinite(value) and value > 0):
                raise NonPositivePrice(line, name, value)
            prices[r, c] = value

    if len(body) < MIN_PRICE_ROWS:
        raise TooFewRows(f"need at least {MIN_PRICE_ROWS} price rows, got {len(body)}")

    table = PriceTable(names, prices, tuple(labels) if has_label_column else None)
    logger.info(f"Parsed price table: {table.n_assets} assets, {table.n_periods} periods")
    return table


def compute_returns(prices: PriceTable, kind: ReturnsKind = ReturnsKind.SIMPLE) -> ReturnMatrix:
    """Convert prices to per-period returns (simple P[t+1]/P[t] - 1, or log)."""
    frame = prices.to_frame()
    if kind == ReturnsKind.LOG:
        returns = np.log(frame / frame.shift(1)).iloc[1:]
    else:
        returns = frame.pct_change(fill_method=None).iloc[1:]
    return ReturnMatrix(prices.asset_names, returns.to_numpy(dtype=float), kind)


def _reject_constant(name: str):
    raise MalformedDocument(f"non-finite number {name} in parameter document")


def _number_list(value, field_name: str) -> List[float]:
    if not isinstance(value, list):
        raise MalformedDocument(f"field {field_name!r} must be an array")
    numbers = []
    for item in value:
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise MalformedDocument(f"field {field_name!r} must contain only numbers")
        try:
            number = float(item)
        except OverflowError:
            number = math.inf
        # 1e400 parses as inf without tripping parse_constant
        if not math.isfinite(number):
            raise MalformedDocument(f"field {field_name!r} has a number out of range: {item!r}")
        numbers.append(number)
    return numbers


def parse_parameter_file(text: str) -> ParameterSet:
    """
    Parse a JSON parameter document with exactly the fields
    `assets`, `means` and `covariance` (row-major array of arrays).
    A covariance asymmetric within tolerance is replaced by (M + M')/2.
    """
    try:
        document = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        raise MalformedDocument(f"invalid parameter document: {e}") from e

    if not isinstance(document, dict):
        raise MalformedDocument("parameter document must be an object")
    keys = set(document.keys())
    if keys != set(PARAMETER_FIELDS):
        missing = sorted(set(PARAMETER_FIELDS) - keys)
        extra = sorted(keys - set(PARAMETER_FIELDS))
        raise MalformedDocument(f"parameter document fields: missing {missing}, unexpected {extra}")

    assets = document["assets"]
    if not isinstance(assets, list) or not assets or not all(isinstance(a, str) for a in assets):
        raise MalformedDocument("field 'assets' must be a non-empty array of strings")

    means = _number_list(document["means"], "means")
    rows = document["covariance"]
    if not isinstance(rows, list):
        raise MalformedDocument("field 'covariance' must be an array of arrays")
    matrix = [_number_list(row, "covariance") for row in rows]

    n = len(assets)
    if len(means) != n:
        raise DimensionMismatch(f"{len(means)} means for {n} assets")
    if len(matrix) != n or any(len(row) != n for row in matrix):
        raise DimensionMismatch(f"covariance must be {n}x{n}")

    covariance = np.array(matrix, dtype=float)
    scale = float(np.max(np.abs(covariance)))
    asymmetry = float(np.max(np.abs(covariance - covariance.T)))
    if asymmetry > PARAMETER_SYMMETRY_TOLERANCE * scale:
        raise AsymmetricCovariance(
            f"covariance asymmetry {asymmetry:.3g} exceeds tolerance relative to {scale:.3g}"
        )
    if asymmetry > 0:
        logger.info(f"Symmetrized covariance (max asymmetry {asymmetry:.3g})")
        covariance = (covariance + covariance.T) / 2.0
    if np.any(np.diag(covariance) < 0):
        raise NegativeVariance("covariance diagonal must be non-negative")

    return ParameterSet(tuple(a.strip() for a in assets), np.array(means), covariance)


def _read_text(path) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except (OSError, UnicodeDecodeError) as e:
        raise InputError(f"cannot read {path}: {e}") from e


def load_price_file(path, has_label_column: bool = False) -> PriceTable:
    """Read and parse a price CSV file."""
    return parse_price_table(_read_text(path), has_label_column)


def load_parameter_file(path) -> ParameterSet:
    """Read and parse a parameter document."""
    return parse_parameter_file(_read_text(path))


def load_sample_prices() -> PriceTable:
    """The bundled four-asset sample dataset."""
    return load_price_file(SAMPLE_DATA_PATH, has_label_column=True)
