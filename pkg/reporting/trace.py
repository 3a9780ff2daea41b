"""
Step-by-step calculation trace.
Shows, per portfolio and method, the covariance block, B or G, E or K,
the determinant, the weight numerators (or the elimination pivots) and the
resulting solution.
"""
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from portfolio_system.moment_estimation import MomentEstimate
from portfolio_system.portfolio_enumeration import SubsetRecord
from portfolio_system.weight_solver import Method, SolverTrace, trace_solution

METHOD_TITLES = {
    Method.MV: "Minimum Variance (MV)",
    Method.MRAR: "Maximum Risk Adjusted Return (MRAR)",
}


@dataclass(frozen=True)
class TraceRecord:
    """Trace of one portfolio under every requested method."""
    ordinal: int
    indices: Tuple[int, ...]
    asset_names: Tuple[str, ...]
    solves: Tuple[SolverTrace, ...]


def build_trace(records: Sequence[SubsetRecord], moments: MomentEstimate,
                methods: Sequence[Method]) -> List[TraceRecord]:
    """Trace the given records in ordinal order."""
    traces = []
    for record in sorted(records, key=lambda r: r.ordinal):
        sub_moments = moments.subset(record.subset.positions)
        traces.append(TraceRecord(
            ordinal=record.ordinal,
            indices=record.subset.indices,
            asset_names=sub_moments.asset_names,
            solves=tuple(trace_solution(sub_moments, method) for method in methods)
        ))
    return traces


def _num(value: float) -> str:
    return f"{value:.8g}"


def _matrix_lines(matrix: np.ndarray, indent: str = "    ") -> List[str]:
    cells = [[_num(v) for v in row] for row in np.atleast_2d(matrix)]
    width = max(len(c) for row in cells for c in row)
    return [indent + "  ".join(c.rjust(width) for c in row) for row in cells]


def _solve_section(trace: SolverTrace) -> List[str]:
    block_label = trace.method.block_label
    system_label = trace.method.system_label
    lines = [f"-- {METHOD_TITLES[trace.method]} --"]

    lines.append("  Covariance matrix (Omega):")
    lines.extend(_matrix_lines(trace.covariance))
    if trace.method == Method.MRAR:
        lines.append("  Average returns (r):")
        lines.extend(_matrix_lines(trace.means))
    lines.append(f"  {block_label} matrix:")
    lines.extend(_matrix_lines(trace.system.block))
    lines.append(f"  {system_label} matrix:")
    lines.extend(_matrix_lines(trace.system.matrix))
    lines.append(f"  |{system_label}| = {_num(trace.determinant)}")

    if trace.numerators is not None:
        lines.append(f"  Weight numerators (signed minors of {system_label}):")
        for j, value in enumerate(trace.numerators, start=1):
            lines.append(f"    w{j}: {_num(value)} / |{system_label}|")
    elif trace.steps:
        lines.append("  Elimination (partial pivoting, equilibrated rows):")
        for step in trace.steps:
            lines.append(f"    column {step.column}: pivot row {step.pivot_row}, pivot {_num(step.pivot)}")

    solution = trace.solution
    if solution is None:
        lines.append(f"  Solve failed: {trace.failure}")
        return lines

    if solution.condition_estimate is not None:
        lines.append(f"  Condition estimate: {_num(solution.condition_estimate)}")
    lines.append("  Weights (w):")
    for name, weight in zip(trace.asset_names, solution.weights.weights):
        lines.append(f"    {name}: {_num(weight)}")
    lines.append(f"  F(w) = {_num(solution.mean)}")
    lines.append(f"  V(w) = {_num(solution.variance)}")
    lines.append(f"  sqrt(V(w)) = {_num(solution.std_dev)}")
    rar = "undefined" if solution.rar is None else _num(solution.rar)
    lines.append(f"  RAR = {rar}")
    if solution.warning:
        lines.append(f"  Warning: {solution.warning}")
    return lines


def emit_trace(traces: Sequence[TraceRecord]) -> str:
    """Render trace records as labeled sections, ordered by portfolio number."""
    lines: List[str] = []
    for record in sorted(traces, key=lambda t: t.ordinal):
        lines.append(f"==== Portfolio {record.ordinal}: {', '.join(record.asset_names)} ====")
        for trace in record.solves:
            lines.extend(_solve_section(trace))
        lines.append("")
    return "\n".join(lines)
