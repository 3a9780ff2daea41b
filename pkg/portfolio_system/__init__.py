"""
Portfolio System package for the optimal portfolio constructor.
This package contains the core components for market data ingestion,
moment estimation, weight solving and portfolio enumeration.
"""
from portfolio_system.config import CovarianceDivisor, ReturnsKind
from portfolio_system.errors import ConfigError
from portfolio_system.market_data import (
    PriceTable, ReturnMatrix, ParameterSet,
    parse_price_table, parse_parameter_file, compute_returns
)
from portfolio_system.moment_estimation import (
    MomentEstimate, AssetStats, estimate_moments, moments_from_parameters, asset_stats
)
from portfolio_system.weight_solver import (
    Method, ConstraintSystem, WeightVector, PortfolioSolution,
    build_mv_system, build_mrar_system, solve_system, cramer_solve_4,
    closed_form_mv, closed_form_mrar, evaluate_portfolio, solve_portfolio
)
from portfolio_system.portfolio_enumeration import (
    AssetSubset, SubsetRecord, RankingReport,
    count_portfolios, enumerate_subsets, rank_portfolios, single_portfolio_report
)

# Version information
__version__ = '0.1.0'

# Export main classes and operations
__all__ = [
    'PriceTable', 'ReturnMatrix', 'ParameterSet',
    'parse_price_table', 'parse_parameter_file', 'compute_returns',
    'MomentEstimate', 'AssetStats', 'estimate_moments', 'moments_from_parameters', 'asset_stats',
    'Method', 'ConstraintSystem', 'WeightVector', 'PortfolioSolution',
    'build_mv_system', 'build_mrar_system', 'solve_system', 'cramer_solve_4',
    'closed_form_mv', 'closed_form_mrar', 'evaluate_portfolio', 'solve_portfolio',
    'AssetSubset', 'SubsetRecord', 'RankingReport',
    'count_portfolios', 'enumerate_subsets', 'rank_portfolios', 'single_portfolio_report',
    'create_portfolio_system'
]


def create_portfolio_system(prices: PriceTable = None, params: ParameterSet = None,
                            returns_kind: ReturnsKind = ReturnsKind.SIMPLE,
                            divisor: CovarianceDivisor = CovarianceDivisor.SAMPLE):
    """
    Factory function turning one input source into the moments every solver consumes.
    Returns:
        tuple: (moment_estimate, asset_stats)
    """
    if (prices is None) == (params is None):
        raise ConfigError("provide exactly one of prices or params")

    if prices is not None:
        moments = estimate_moments(compute_returns(prices, returns_kind), divisor)
    else:
        moments = moments_from_parameters(params)

    return moments, asset_stats(moments)
