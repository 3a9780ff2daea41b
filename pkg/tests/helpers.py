# tests/helpers.py
"""Shared fixtures for the portfolio constructor tests."""
import numpy as np

from portfolio_system.moment_estimation import MomentEstimate

# Daily mean returns of USD-JPY, Brent Oil, DAX and Dow Jones over 2021
PUBLISHED_NAMES = ("USD-JPY", "Brent Oil", "DAX", "Dow Jones")
PUBLISHED_MEANS = np.array([0.00029673, 0.00364822, 0.00142506, 0.0017301])
PUBLISHED_MV_WEIGHTS = np.array([1.09569014, 0.08033079, -0.07538021, -0.10064071])
PUBLISHED_MRAR_WEIGHTS = np.array([0.11642855, 0.46561635, -0.11039877, 0.52835387])
PUBLISHED_MV_MEAN = 0.00033665
PUBLISHED_MRAR_MEAN = 0.00249
# rounded to eight decimals, so the sums are only good to 2e-8
PUBLISHED_WEIGHT_TOLERANCE = 2e-8


def random_moments(rng: np.random.Generator, n: int, scale: float = 1e-4) -> MomentEstimate:
    """Diagonally dominant SPD covariance with positive means."""
    a = rng.standard_normal((n, n))
    covariance = scale * (0.1 * a @ a.T / n + np.eye(n) * rng.uniform(0.5, 2.0, n))
    covariance = (covariance + covariance.T) / 2.0
    means = rng.uniform(0.0005, 0.005, n)
    names = tuple(f"A{i + 1}" for i in range(n))
    return MomentEstimate(names, means, covariance)


def random_price_csv(rng: np.random.Generator, n_assets: int, n_rows: int) -> str:
    """Geometric random walk prices as CSV text."""
    steps = rng.normal(0.0005, 0.01, (n_rows, n_assets))
    prices = 100.0 * np.exp(np.cumsum(steps, axis=0))
    header = ",".join(f"Asset{i + 1}" for i in range(n_assets))
    rows = [",".join(f"{p:.6f}" for p in row) for row in prices]
    return "\n".join([header] + rows) + "\n"
