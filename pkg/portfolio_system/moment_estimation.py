"""
Moment estimation for the portfolio constructor.
Estimates the mean-return vector and the variance-covariance matrix from
returns, or adopts them from a directly supplied parameter set.
"""
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from portfolio_system.config import CovarianceDivisor, MOMENT_SYMMETRY_TOLERANCE
from portfolio_system.errors import (
    DimensionMismatch, InputError, NegativeVariance, TooFewObservations
)
from portfolio_system.market_data import ParameterSet, ReturnMatrix
from utils.logger import get_logger

logger = get_logger("MomentEstimation")


@dataclass(frozen=True, eq=False)
class MomentEstimate:
    """Mean returns and covariance matrix for n assets."""
    asset_names: Tuple[str, ...]
    means: np.ndarray
    covariance: np.ndarray
    sample_size: int = 0  # 0 when supplied as parameters

    def __post_init__(self):
        names = tuple(self.asset_names)
        means = np.array(self.means, dtype=float)
        covariance = np.array(self.covariance, dtype=float)
        n = len(names)
        if n < 1:
            raise InputError("moment estimate needs at least one asset")
        if means.shape != (n,) or covariance.shape != (n, n):
            raise DimensionMismatch(
                f"means {means.shape} / covariance {covariance.shape} do not match {n} assets"
            )
        if not (np.all(np.isfinite(means)) and np.all(np.isfinite(covariance))):
            raise InputError("means and covariance must be finite")
        scale = float(np.max(np.abs(covariance)))
        if np.max(np.abs(covariance - covariance.T)) > MOMENT_SYMMETRY_TOLERANCE * scale:
            raise InputError("covariance matrix must be symmetric")
        if np.any(np.diag(covariance) < 0):
            raise NegativeVariance("covariance diagonal must be non-negative")
        means.setflags(write=False)
        covariance.setflags(write=False)
        object.__setattr__(self, "asset_names", names)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "covariance", covariance)

    @property
    def n_assets(self) -> int:
        return len(self.asset_names)

    def subset(self, positions: Sequence[int]) -> "MomentEstimate":
        """Principal sub-moments for 0-based asset positions."""
        idx = np.asarray(positions, dtype=int)
        return MomentEstimate(
            asset_names=tuple(self.asset_names[i] for i in idx),
            means=self.means[idx],
            covariance=self.covariance[np.ix_(idx, idx)],
            sample_size=self.sample_size
        )

    def to_parameter_set(self) -> ParameterSet:
        return ParameterSet(self.asset_names, self.means, self.covariance)

    def equals(self, other: "MomentEstimate", tolerance: float = 0.0) -> bool:
        return (
            self.asset_names == other.asset_names
            and self.sample_size == other.sample_size
            and bool(np.allclose(self.means, other.means, rtol=tolerance, atol=0.0))
            and bool(np.allclose(self.covariance, other.covariance, rtol=tolerance, atol=0.0))
        )


@dataclass(frozen=True)
class AssetStats:
    """Per-asset mean, standard deviation and risk adjusted return."""
    name: str
    mean: float
    std_dev: float
    rar: Optional[float] = None  # None when std_dev is 0

    @property
    def rar_defined(self) -> bool:
        return self.rar is not None


def estimate_moments(returns: ReturnMatrix,
                     divisor: CovarianceDivisor = CovarianceDivisor.SAMPLE) -> MomentEstimate:
    """
    Estimate means and covariance with two-pass (mean, then deviation) accumulation.
    Args:
        returns: per-period returns, at least two rows
        divisor: SAMPLE divides by m - 1, POPULATION by m
    """
    data = returns.returns
    m = data.shape[0]
    if m < 2:
        raise TooFewObservations(f"need at least 2 return observations, got {m}")

    means = data.mean(axis=0)
    deviations = data - means
    denominator = m - 1 if divisor == CovarianceDivisor.SAMPLE else m
    covariance = deviations.T @ deviations / denominator
    # mirror the upper triangle so the matrix is exactly symmetric
    covariance = np.triu(covariance) + np.triu(covariance, 1).T

    logger.info(f"Estimated moments for {len(returns.asset_names)} assets from {m} observations "
                f"({divisor.value} divisor)")
    return MomentEstimate(returns.asset_names, means, covariance, sample_size=m)


def moments_from_parameters(params: ParameterSet) -> MomentEstimate:
    """Adopt directly supplied parameters."""
    return MomentEstimate(params.asset_names, params.means, params.covariance, sample_size=0)


def asset_stats(moments: MomentEstimate) -> List[AssetStats]:
    """Mean, standard deviation and mean/std_dev per asset."""
    stats = []
    for name, mean, variance in zip(moments.asset_names, moments.means, np.diag(moments.covariance)):
        std_dev = float(np.sqrt(variance))
        rar = float(mean) / std_dev if std_dev > 0 else None
        stats.append(AssetStats(name=name, mean=float(mean), std_dev=std_dev, rar=rar))
    return stats
