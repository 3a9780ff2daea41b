"""
Weight solver for the portfolio constructor.

Builds the stacked constraint systems E = [B; 1'] (minimum variance) and
K = [G; 1'] (maximum risk adjusted return) and solves them for the optimal
budget shares. Three independent oracles are kept next to the main solver:
the n=4 Cramer determinants, the covariance-inverse closed forms, and the
evaluation helpers used by the brute-force tests.
"""
import dataclasses
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from portfolio_system.config import (
    BUDGET_TOLERANCE, CONDITION_LIMIT, NORMALIZATION_TOLERANCE,
    PIVOT_TOLERANCE, VARIANCE_CLAMP
)
from portfolio_system.errors import (
    DegenerateNormalization, DimensionMismatch, InputError,
    NegativePortfolioVariance, NumericalError, SingularSystem, TooFewAssets, WrongDimension
)
from portfolio_system.moment_estimation import MomentEstimate
from utils.logger import get_logger

logger = get_logger("WeightSolver")

MINIMIZING_REGIME_WARNING = (
    "MRAR stationary point minimizes the risk adjusted return (1'inv(Omega)r < 0)"
)


class Method(Enum):
    """Portfolio construction criteria."""
    MV = "mv"      # minimum variance
    MRAR = "mrar"  # maximum risk adjusted return

    @property
    def block_label(self) -> str:
        return "B" if self == Method.MV else "G"

    @property
    def system_label(self) -> str:
        return "E" if self == Method.MV else "K"


@dataclass(frozen=True, eq=False)
class ConstraintSystem:
    """
    The n x n system whose rows 1..n-1 are B (or G) and whose last row is
    all ones, with right-hand side (0, ..., 0, 1).
    """
    method: Method
    matrix: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        rhs = np.array(self.rhs, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatch(f"constraint matrix must be square, got {matrix.shape}")
        n = matrix.shape[0]
        if n < 2:
            raise TooFewAssets(f"constraint system needs n >= 2, got {n}")
        if not np.array_equal(matrix[-1], np.ones(n)):
            raise InputError("last row of the constraint matrix must be all ones")
        expected_rhs = np.zeros(n)
        expected_rhs[-1] = 1.0
        if not np.array_equal(rhs, expected_rhs):
            raise InputError("right-hand side must be (0, ..., 0, 1)")
        matrix.setflags(write=False)
        rhs.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "rhs", rhs)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def block(self) -> np.ndarray:
        """The (n-1) x n B or G block."""
        return self.matrix[:-1]


@dataclass(frozen=True, eq=False)
class WeightVector:
    """Budget shares summing to one; negative entries are short positions."""
    weights: np.ndarray
    tolerance: float = BUDGET_TOLERANCE

    def __post_init__(self):
        weights = np.array(self.weights, dtype=float)
        if weights.ndim != 1 or weights.size == 0:
            raise DimensionMismatch("weights must be a non-empty vector")
        if not np.all(np.isfinite(weights)):
            raise InputError("weights must be finite")
        total = float(weights.sum())
        if abs(total - 1.0) > self.tolerance:
            raise InputError(f"weights sum to {total!r}, expected 1 within {self.tolerance:g}")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return self.weights.size

    def as_list(self) -> List[float]:
        return [float(v) for v in self.weights]


@dataclass(frozen=True, eq=False)
class PortfolioSolution:
    """Weights plus F(w), V(w), sqrt(V(w)) and RAR for one method on one asset set."""
    method: Method
    weights: WeightVector
    mean: float
    variance: float
    std_dev: float
    rar: Optional[float]  # None when the variance is 0
    condition_estimate: Optional[float] = None
    warning: Optional[str] = None

    @property
    def rar_defined(self) -> bool:
        return self.rar is not None


@dataclass(frozen=True)
class EliminationStep:
    """One pivot of the partially pivoted elimination."""
    column: int      # 1-based
    pivot_row: int   # 1-based row chosen before the swap
    pivot: float


@dataclass(frozen=True, eq=False)
class _Solved:
    weights: WeightVector
    condition_estimate: float
    steps: Tuple[EliminationStep, ...]


@dataclass(frozen=True, eq=False)
class SolverTrace:
    """Intermediate values of one solve, for the step-by-step trace."""
    method: Method
    asset_names: Tuple[str, ...]
    covariance: np.ndarray
    means: np.ndarray
    system: ConstraintSystem
    determinant: float
    numerators: Optional[Tuple[float, ...]]  # signed minors, n == 4 only
    steps: Tuple[EliminationStep, ...]
    solution: Optional[PortfolioSolution]
    failure: Optional[str] = None


def _pair_sums(covariance: np.ndarray) -> np.ndarray:
    # S[i, j] = sigma_{i,j} + sigma_{j,i}
    return covariance + covariance.T


def _stack(method: Method, block: np.ndarray) -> ConstraintSystem:
    n = block.shape[1]
    matrix = np.vstack([block, np.ones((1, n))])
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    return ConstraintSystem(method, matrix, rhs)


def build_mv_system(moments: MomentEstimate) -> ConstraintSystem:
    """
    E = [B; 1'] with B[i, j] = (s[i+1, j] + s[j, i+1]) - (s[i, j] + s[j, i])
    for the covariance entries s, rows i = 1..n-1.
    """
    n = moments.n_assets
    if n < 2:
        raise TooFewAssets(f"minimum variance system needs n >= 2, got {n}")
    sums = _pair_sums(moments.covariance)
    block = sums[1:] - sums[:-1]
    return _stack(Method.MV, block)


def build_mrar_system(moments: MomentEstimate) -> ConstraintSystem:
    """
    K = [G; 1'] with G[i, j] = r[i] (s[i+1, j] + s[j, i+1]) - r[i+1] (s[i, j] + s[j, i]).
    """
    n = moments.n_assets
    if n < 2:
        raise TooFewAssets(f"MRAR system needs n >= 2, got {n}")
    sums = _pair_sums(moments.covariance)
    r = moments.means
    block = r[:-1, None] * sums[1:] - r[1:, None] * sums[:-1]
    return _stack(Method.MRAR, block)


def build_system(moments: MomentEstimate, method: Method) -> ConstraintSystem:
    if method == Method.MV:
        return build_mv_system(moments)
    return build_mrar_system(moments)


def _equilibrate(system: ConstraintSystem) -> np.ndarray:
    """Divide each homogeneous row by its largest |entry|; the solution is unchanged."""
    matrix = np.array(system.matrix)
    row_scale = np.max(np.abs(matrix[:-1]), axis=1)
    zero_rows = np.flatnonzero(row_scale == 0)
    if zero_rows.size:
        raise SingularSystem(
            f"|{system.method.system_label}| = 0: row {int(zero_rows[0]) + 1} of "
            f"{system.method.block_label} is all zeros",
            condition_estimate=float("inf")
        )
    matrix[:-1] /= row_scale[:, None]
    return matrix


def _condition(matrix: np.ndarray) -> float:
    with np.errstate(all="ignore"):
        try:
            return float(np.linalg.cond(matrix))
        except np.linalg.LinAlgError:
            return float("inf")


def _eliminate(matrix: np.ndarray, rhs: np.ndarray, label: str,
               condition: float) -> Tuple[np.ndarray, Tuple[EliminationStep, ...]]:
    """Gaussian elimination with partial pivoting and back substitution."""
    a = np.array(matrix, dtype=float)
    b = np.array(rhs, dtype=float)
    n = b.size
    threshold = PIVOT_TOLERANCE * float(np.max(np.abs(a)))
    steps = []

    # Forward elimination
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[p, k]) < threshold:
            raise SingularSystem(
                f"|{label}| = 0: pivot {abs(a[p, k]):.3g} in column {k + 1} is below threshold",
                condition_estimate=condition
            )
        # Swap pivot row into place
        if p != k:
            a[[k, p]] = a[[p, k]]
            b[[k, p]] = b[[p, k]]
        steps.append(EliminationStep(column=k + 1, pivot_row=p + 1, pivot=float(a[k, k])))
        if k < n - 1:
            factors = a[k + 1:, k] / a[k, k]
            a[k + 1:, k:] -= np.outer(factors, a[k, k:])
            b[k + 1:] -= factors * b[k]

    # Back substitution
    x = np.empty(n)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - a[k, k + 1:] @ x[k + 1:]) / a[k, k]
    return x, tuple(steps)


def _solve(system: ConstraintSystem) -> _Solved:
    label = system.method.system_label
    # Scale rows, then reject ill-conditioned systems
    equilibrated = _equilibrate(system)
    condition = _condition(equilibrated)
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        raise SingularSystem(f"|{label}| is numerically zero", condition_estimate=condition)

    x, steps = _eliminate(equilibrated, system.rhs, label, condition)
    residual = float(np.max(np.abs(equilibrated @ x - system.rhs)))
    if residual > 1e-9 * float(np.max(np.abs(equilibrated))):
        logger.warning(f"Residual {residual:.3g} for {label} system (condition {condition:.3g})")
    # the last equation fixes the sum to 1 up to rounding
    return _Solved(WeightVector(x / x.sum()), condition, steps)


def solve_system(system: ConstraintSystem) -> WeightVector:
    """Solve matrix . w = (0, ..., 0, 1) by partially pivoted elimination."""
    return _solve(system).weights


def _signed_minors(matrix: np.ndarray) -> np.ndarray:
    # cofactors along the ones row: (-1)^(n+j) |minor without row n and column j|
    n = matrix.shape[0]
    block = matrix[:-1]
    return np.array([
        (-1) ** (n + j) * np.linalg.det(np.delete(block, j - 1, axis=1))
        for j in range(1, n + 1)
    ])


def cramer_solve_4(system: ConstraintSystem) -> WeightVector:
    """
    Cramer's rule for four assets: w_j is the signed 3x3 minor of the
    B (or G) block without column j, divided by |E| (or |K|).
    """
    if system.n != 4:
        raise WrongDimension(f"Cramer solver is defined for n = 4, got n = {system.n}")

    label = system.method.system_label
    numerators = _signed_minors(system.matrix)
    # cofactor expansion of |E| along the ones row
    determinant = float(numerators.sum())
    hadamard = float(np.prod(np.linalg.norm(system.matrix, axis=1)))
    if not np.isfinite(determinant) or abs(determinant) <= PIVOT_TOLERANCE * hadamard:
        raise SingularSystem(f"|{label}| = {determinant:.3g}")
    return WeightVector(numerators / determinant)


def _checked_inverse_solve(covariance: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    condition = _condition(covariance)
    if not np.isfinite(condition) or condition > CONDITION_LIMIT:
        raise SingularSystem("covariance matrix is singular", condition_estimate=condition)
    try:
        return np.linalg.solve(covariance, rhs)
    except np.linalg.LinAlgError as e:
        raise SingularSystem(f"covariance matrix is singular: {e}", condition_estimate=condition) from e


def closed_form_mv(moments: MomentEstimate) -> WeightVector:
    """Global minimum variance weights inv(Omega) 1 / (1' inv(Omega) 1)."""
    x = _checked_inverse_solve(moments.covariance, np.ones(moments.n_assets))
    return WeightVector(x / x.sum())


def closed_form_mrar(moments: MomentEstimate) -> WeightVector:
    """Maximum risk adjusted return weights inv(Omega) r / (1' inv(Omega) r)."""
    x = _checked_inverse_solve(moments.covariance, moments.means)
    normalization = float(x.sum())
    if abs(normalization) <= NORMALIZATION_TOLERANCE * float(np.sum(np.abs(x))):
        raise DegenerateNormalization(
            f"1'inv(Omega)r = {normalization:.3g} is numerically zero"
        )
    return WeightVector(x / normalization)


def evaluate_portfolio(weights: WeightVector, moments: MomentEstimate, method: Method,
                       condition_estimate: Optional[float] = None) -> PortfolioSolution:
    """F(w) = r'w, V(w) = w' Omega w, and RAR = F(w) / sqrt(V(w))."""
    w = weights.weights
    if w.size != moments.n_assets:
        raise DimensionMismatch(f"{w.size} weights for {moments.n_assets} assets")

    # Expected return and risk
    mean = float(moments.means @ w)
    variance = float(w @ moments.covariance @ w)
    if variance < 0:
        if variance < -VARIANCE_CLAMP:
            raise NegativePortfolioVariance(f"portfolio variance {variance:.3g} is negative")
        logger.warning(f"Clamped portfolio variance {variance:.3g} to 0")
        variance = 0.0
    std_dev = float(np.sqrt(variance))
    rar = mean / std_dev if std_dev > 0 else None
    return PortfolioSolution(
        method=method,
        weights=weights,
        mean=mean,
        variance=variance,
        std_dev=std_dev,
        rar=rar,
        condition_estimate=condition_estimate
    )


def _solve_and_evaluate(moments: MomentEstimate, method: Method,
                        system: ConstraintSystem = None) -> Tuple[PortfolioSolution, _Solved]:
    system = system or build_system(moments, method)
    solved = _solve(system)
    solution = evaluate_portfolio(solved.weights, moments, method, solved.condition_estimate)
    if method == Method.MRAR and solution.mean < 0:
        # sign(F(w)) = sign(1'inv(Omega)r) for positive definite Omega
        solution = dataclasses.replace(solution, warning=MINIMIZING_REGIME_WARNING)
        logger.warning(f"MRAR portfolio of {', '.join(moments.asset_names)} has mean "
                       f"{solution.mean:.3g} < 0; stationary point minimizes RAR")
    return solution, solved


def solve_portfolio(moments: MomentEstimate, method: Method) -> PortfolioSolution:
    """Build, solve and evaluate one method on one asset set."""
    solution, _ = _solve_and_evaluate(moments, method)
    return solution


def trace_solution(moments: MomentEstimate, method: Method) -> SolverTrace:
    """Solve like solve_portfolio while keeping every intermediate value."""
    system = build_system(moments, method)
    determinant = float(np.linalg.det(system.matrix))
    numerators = tuple(float(v) for v in _signed_minors(system.matrix)) if system.n == 4 else None

    solution, steps, failure = None, (), None
    try:
        solution, solved = _solve_and_evaluate(moments, method, system)
        steps = solved.steps
    except NumericalError as e:
        failure = str(e)

    return SolverTrace(
        method=method,
        asset_names=moments.asset_names,
        covariance=moments.covariance,
        means=moments.means,
        system=system,
        determinant=determinant,
        numerators=numerators,
        steps=steps,
        solution=solution,
        failure=failure
    )
