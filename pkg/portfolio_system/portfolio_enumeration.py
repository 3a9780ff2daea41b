"""
Portfolio enumeration for the portfolio constructor.

Every subset of at least two assets is solved under the requested criteria
and ranked by risk adjusted return, which makes the number of assets in the
portfolio an outcome rather than an input.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

from portfolio_system.config import DEFAULT_ENUMERATION_CAP, ENUMERATION_OVERFLOW_LIMIT, MethodChoice
from portfolio_system.errors import (
    AllSubsetsSingular, EnumerationCapExceeded, EnumerationOverflow,
    NumericalError, TooFewAssets
)
from portfolio_system.moment_estimation import MomentEstimate
from portfolio_system.weight_solver import Method, PortfolioSolution, solve_portfolio
from utils.logger import get_logger

logger = get_logger("PortfolioEnumeration")

ALL_METHODS: Tuple[Method, ...] = (Method.MV, Method.MRAR)
METHODS_FOR_CHOICE = {
    MethodChoice.MV: (Method.MV,),
    MethodChoice.MRAR: (Method.MRAR,),
    MethodChoice.BOTH: ALL_METHODS,
}


@dataclass(frozen=True)
class AssetSubset:
    """A set of asset positions (1-based, strictly increasing) and its portfolio number."""
    indices: Tuple[int, ...]
    ordinal: int

    def __post_init__(self):
        indices = tuple(int(i) for i in self.indices)
        if len(indices) < 2:
            raise TooFewAssets(f"a portfolio subset needs at least 2 assets, got {len(indices)}")
        if any(b <= a for a, b in zip(indices, indices[1:])) or indices[0] < 1:
            raise ValueError(f"subset indices must be strictly increasing and 1-based: {indices}")
        object.__setattr__(self, "indices", indices)

    @property
    def size(self) -> int:
        return len(self.indices)

    @property
    def positions(self) -> Tuple[int, ...]:
        """0-based positions for array slicing."""
        return tuple(i - 1 for i in self.indices)


@dataclass(frozen=True)
class SubsetRecord:
    """Solutions of one subset; a failed solve leaves a note instead."""
    subset: AssetSubset
    asset_names: Tuple[str, ...]
    mv: Optional[PortfolioSolution] = None
    mrar: Optional[PortfolioSolution] = None
    mv_failure: Optional[str] = None
    mrar_failure: Optional[str] = None

    @property
    def ordinal(self) -> int:
        return self.subset.ordinal

    def solution(self, method: Method) -> Optional[PortfolioSolution]:
        return self.mv if method == Method.MV else self.mrar

    def failure(self, method: Method) -> Optional[str]:
        return self.mv_failure if method == Method.MV else self.mrar_failure

    def rar(self, method: Method) -> Optional[float]:
        solution = self.solution(method)
        return solution.rar if solution is not None else None


@dataclass(frozen=True)
class RankingReport:
    """All subset portfolios plus the best record per method."""
    asset_names: Tuple[str, ...]
    records: Tuple[SubsetRecord, ...]
    methods: Tuple[Method, ...]
    best_mv: Optional[int] = None
    best_mrar: Optional[int] = None
    portfolio_count: int = 0
    enumerated: bool = False

    @property
    def P(self) -> int:
        return self.portfolio_count

    def best(self, method: Method) -> Optional[int]:
        return self.best_mv if method == Method.MV else self.best_mrar

    def record(self, ordinal: int) -> SubsetRecord:
        return self.records[ordinal - 1]

    def ranked(self, method: Method) -> List[SubsetRecord]:
        """Records by descending RAR (ties by lowest ordinal); undefined RAR last."""
        defined = [r for r in self.records if r.rar(method) is not None]
        undefined = [r for r in self.records if r.rar(method) is None]
        defined.sort(key=lambda r: (-r.rar(method), r.ordinal))
        return defined + undefined


def count_portfolios(n: int) -> int:
    """
    Number of subsets with at least two assets:
    P = sum_{l=0}^{n-2} C(n, n-l) = 2^n - n - 1.
    """
    if n < 2:
        raise TooFewAssets(f"portfolio count needs n >= 2, got {n}")
    if n > ENUMERATION_OVERFLOW_LIMIT:
        raise EnumerationOverflow(
            f"portfolio count for n = {n} exceeds the {ENUMERATION_OVERFLOW_LIMIT}-asset guard"
        )
    total = sum(math.comb(n, n - l) for l in range(n - 1))
    assert total == 2 ** n - n - 1
    return total


def enumerate_subsets(n: int, cap: int = DEFAULT_ENUMERATION_CAP) -> List[AssetSubset]:
    """All subsets of size >= 2, by descending size, then lexicographically."""
    if n < 2:
        raise TooFewAssets(f"enumeration needs n >= 2, got {n}")
    if n > cap:
        raise EnumerationCapExceeded(
            f"{n} assets exceed the enumeration cap of {cap} "
            f"({count_portfolios(n) if n <= ENUMERATION_OVERFLOW_LIMIT else 'too many'} portfolios); "
            f"raise it with --max-assets"
        )
    subsets = []
    ordinal = 1
    for size in range(n, 1, -1):
        for combo in combinations(range(1, n + 1), size):
            subsets.append(AssetSubset(indices=combo, ordinal=ordinal))
            ordinal += 1
    return subsets


def _solve_subset(moments: MomentEstimate, subset: AssetSubset,
                  methods: Sequence[Method]) -> SubsetRecord:
    sub_moments = moments.subset(subset.positions)
    solutions: Dict[str, Optional[PortfolioSolution]] = {"mv": None, "mrar": None}
    failures: Dict[str, Optional[str]] = {"mv": None, "mrar": None}

    for method in methods:
        try:
            solutions[method.value] = solve_portfolio(sub_moments, method)
        except NumericalError as e:
            failures[method.value] = str(e)
            logger.warning(f"Portfolio {subset.ordinal} {subset.indices}: {method.value} solve failed: {e}")
        else:
            logger.debug(f"Portfolio {subset.ordinal} {method.value}: RAR {solutions[method.value].rar}")

    return SubsetRecord(
        subset=subset,
        asset_names=sub_moments.asset_names,
        mv=solutions["mv"],
        mrar=solutions["mrar"],
        mv_failure=failures["mv"],
        mrar_failure=failures["mrar"]
    )


def _best_ordinal(records: Sequence[SubsetRecord], method: Method) -> Optional[int]:
    best = None
    for record in records:
        rar = record.rar(method)
        if rar is None:
            continue
        # strict comparison keeps the lowest ordinal on ties
        if best is None or rar > best.rar(method):
            best = record
    return best.ordinal if best is not None else None


def _assemble(moments: MomentEstimate, records: List[SubsetRecord],
              methods: Tuple[Method, ...], portfolio_count: int,
              enumerated: bool) -> RankingReport:
    records.sort(key=lambda r: r.ordinal)
    best_mv = _best_ordinal(records, Method.MV) if Method.MV in methods else None
    best_mrar = _best_ordinal(records, Method.MRAR) if Method.MRAR in methods else None
    if all(record.solution(m) is None for record in records for m in methods):
        raise AllSubsetsSingular(
            f"every portfolio failed to solve ({len(records)} portfolios, "
            f"methods {', '.join(m.value for m in methods)})"
        )
    return RankingReport(
        asset_names=moments.asset_names,
        records=tuple(records),
        methods=methods,
        best_mv=best_mv,
        best_mrar=best_mrar,
        portfolio_count=portfolio_count,
        enumerated=enumerated
    )


def rank_portfolios(moments: MomentEstimate,
                    methods: Sequence[Method] = ALL_METHODS,
                    cap: int = DEFAULT_ENUMERATION_CAP,
                    workers: int = 1) -> RankingReport:
    """
    Solve every subset of size >= 2 and pick the best portfolio per method.
    Args:
        moments: moments of all n assets
        methods: criteria to solve
        cap: largest n allowed without an explicit override
        workers: thread-pool size; results are merged by ordinal
    """
    methods = tuple(methods)
    subsets = enumerate_subsets(moments.n_assets, cap)
    logger.info(f"Constructing {len(subsets)} portfolios for {moments.n_assets} assets")

    # Solve subsets
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            records = list(executor.map(lambda s: _solve_subset(moments, s, methods), subsets))
    else:
        records = [_solve_subset(moments, subset, methods) for subset in subsets]

    # Rank
    report = _assemble(moments, records, methods, count_portfolios(moments.n_assets), enumerated=True)
    logger.info(f"Best portfolio: MV -> {report.best_mv}, MRAR -> {report.best_mrar}")
    return report


def single_portfolio_report(moments: MomentEstimate,
                            methods: Sequence[Method] = ALL_METHODS) -> RankingReport:
    """A one-record report for the portfolio holding every asset."""
    methods = tuple(methods)
    n = moments.n_assets
    if n < 2:
        raise TooFewAssets(f"a portfolio needs at least 2 assets, got {n}")
    subset = AssetSubset(indices=tuple(range(1, n + 1)), ordinal=1)
    # no failure notes here: a singular full set is a hard error
    solutions = {method: solve_portfolio(moments, method) for method in methods}
    record = SubsetRecord(
        subset=subset,
        asset_names=moments.asset_names,
        mv=solutions.get(Method.MV),
        mrar=solutions.get(Method.MRAR)
    )
    return _assemble(moments, [record], methods, portfolio_count=1, enumerated=False)
