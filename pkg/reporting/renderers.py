"""
Report rendering for the portfolio constructor.
Renders a RankingReport as an aligned text table, CSV or a JSON document.
"""
import io
import csv
import json
from typing import Any, Dict, List, Optional, Sequence

from portfolio_system.config import OutputFormat
from portfolio_system.moment_estimation import AssetStats
from portfolio_system.portfolio_enumeration import RankingReport, SubsetRecord
from portfolio_system.weight_solver import Method, PortfolioSolution

MV_LABEL = "Portfolio - Minimum Variance (MV)"
MRAR_LABEL = "Portfolio - Maximum Risk Adjusted Return (MRAR)"
METHOD_LABELS = {Method.MV: MV_LABEL, Method.MRAR: MRAR_LABEL}

CSV_COLUMNS = [
    "ordinal", "row_type", "name", "mean", "std_dev", "rar",
    "weight_mv", "weight_mrar", "variance", "warning"
]


def select_records(report: RankingReport, top_k: Optional[int] = None) -> List[SubsetRecord]:
    """All records in ordinal order, or the top_k best by the primary method's RAR."""
    if top_k is None:
        return list(report.records)
    primary = Method.MRAR if Method.MRAR in report.methods else Method.MV
    return report.ranked(primary)[:top_k]


def render_report(report: RankingReport, stats: Sequence[AssetStats],
                  output_format: OutputFormat = OutputFormat.TABLE,
                  top_k: Optional[int] = None) -> str:
    """
    Render the report.
    Args:
        report: solved portfolios
        stats: per-asset statistics for every asset of the full universe
        output_format: table, csv or json
        top_k: keep only the k best portfolios (rank order)
    """
    records = select_records(report, top_k)
    if output_format == OutputFormat.JSON:
        return _render_json(report, stats, records)
    if output_format == OutputFormat.CSV:
        return _render_csv(report, stats, records)
    return _render_table(report, stats, records)


# JSON

def _solution_document(record: SubsetRecord, method: Method,
                       report: RankingReport) -> Optional[Dict[str, Any]]:
    if method not in report.methods:
        return None
    solution = record.solution(method)
    if solution is None:
        return {
            "weights": None, "mean": None, "variance": None,
            "std_dev": None, "rar": None, "warning": record.failure(method)
        }
    return {
        "weights": solution.weights.as_list(),
        "mean": solution.mean,
        "variance": solution.variance,
        "std_dev": solution.std_dev,
        "rar": solution.rar,
        "warning": solution.warning
    }


def report_document(report: RankingReport, stats: Sequence[AssetStats],
                    records: Sequence[SubsetRecord]) -> Dict[str, Any]:
    """The JSON report as plain Python objects."""
    return {
        "assets": [
            {"name": s.name, "mean": s.mean, "std_dev": s.std_dev, "rar": s.rar}
            for s in stats
        ],
        "portfolios": [
            {
                "ordinal": record.ordinal,
                "indices": list(record.subset.indices),
                "names": list(record.asset_names),
                "mv": _solution_document(record, Method.MV, report),
                "mrar": _solution_document(record, Method.MRAR, report)
            }
            for record in records
        ],
        "best_mv": report.best_mv,
        "best_mrar": report.best_mrar,
        "P": report.P
    }


def _render_json(report: RankingReport, stats: Sequence[AssetStats],
                 records: Sequence[SubsetRecord]) -> str:
    return json.dumps(report_document(report, stats, records), indent=2) + "\n"


# CSV

def _csv_number(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def _render_csv(report: RankingReport, stats: Sequence[AssetStats],
                records: Sequence[SubsetRecord]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)

    for record in records:
        mv, mrar = record.mv, record.mrar
        for k, position in enumerate(record.subset.positions):
            stat = stats[position]
            writer.writerow([
                record.ordinal, "asset", stat.name,
                _csv_number(stat.mean), _csv_number(stat.std_dev), _csv_number(stat.rar),
                _csv_number(mv.weights.weights[k] if mv else None),
                _csv_number(mrar.weights.weights[k] if mrar else None),
                "", ""
            ])
        # Portfolio rows
        for method in report.methods:
            solution = record.solution(method)
            if solution is None:
                writer.writerow([record.ordinal, method.value, METHOD_LABELS[method],
                                 "", "", "", "", "", "", record.failure(method) or ""])
                continue
            writer.writerow([
                record.ordinal, method.value, METHOD_LABELS[method],
                _csv_number(solution.mean), _csv_number(solution.std_dev), _csv_number(solution.rar),
                "", "", _csv_number(solution.variance), solution.warning or ""
            ])
    return buffer.getvalue()


# Table

def _fmt(value: Optional[float]) -> str:
    return "n/a" if value is None else f"{value:.8g}"


def _format_rows(rows: List[List[str]]) -> List[str]:
    """Left-align the first column, right-align the rest."""
    widths = [max(len(row[c]) for row in rows) for c in range(len(rows[0]))]
    lines = []
    for row in rows:
        cells = [row[0].ljust(widths[0])] + [cell.rjust(w) for cell, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    return lines


def _portfolio_block(record: SubsetRecord, stats: Sequence[AssetStats],
                     report: RankingReport) -> List[str]:
    names = ", ".join(record.asset_names)
    lines = [f"Portfolio {record.ordinal} ({record.subset.size} assets: {names})"]

    header = ["Assets", "Average Return", "SD", "Risk Adjusted Return"]
    header += [f"w for {m.value.upper()}" for m in report.methods]
    # One row per asset, then one per method
    rows = [header]
    for k, position in enumerate(record.subset.positions):
        stat = stats[position]
        row = [stat.name, _fmt(stat.mean), _fmt(stat.std_dev), _fmt(stat.rar)]
        for method in report.methods:
            solution = record.solution(method)
            row.append(_fmt(solution.weights.weights[k]) if solution else "n/a")
        rows.append(row)

    notes = []
    for method in report.methods:
        solution: Optional[PortfolioSolution] = record.solution(method)
        if solution is None:
            rows.append([METHOD_LABELS[method], "n/a", "n/a", "n/a"] + [""] * len(report.methods))
            notes.append(f"  {method.value.upper()} failed: {record.failure(method)}")
            continue
        rows.append([METHOD_LABELS[method], _fmt(solution.mean), _fmt(solution.std_dev),
                     _fmt(solution.rar)] + [""] * len(report.methods))
        if solution.warning:
            notes.append(f"  {method.value.upper()} warning: {solution.warning}")

    return lines + _format_rows(rows) + notes


def _summary_block(report: RankingReport) -> List[str]:
    rows = [["Portfolio"] + [m.value.upper() for m in report.methods]]
    for record in report.records:
        rows.append([f"Portfolio - {record.ordinal}"] + [_fmt(record.rar(m)) for m in report.methods])
    lines = ["List of portfolios by risk adjusted return"] + _format_rows(rows)

    # Best portfolio per method
    lines.append("")
    lines.append("Portfolio with the highest RAR")
    best_rows = [["Method", "Portfolio", "RAR"]]
    for method in report.methods:
        ordinal = report.best(method)
        if ordinal is None:
            best_rows.append([method.value.upper(), "none", "n/a"])
        else:
            best_rows.append([method.value.upper(), f"Portfolio {ordinal}",
                              _fmt(report.record(ordinal).rar(method))])
    return lines + _format_rows(best_rows)


def _render_table(report: RankingReport, stats: Sequence[AssetStats],
                  records: Sequence[SubsetRecord]) -> str:
    lines: List[str] = [f"Number of portfolios: {report.P}", ""]
    for record in records:
        lines.extend(_portfolio_block(record, stats, report))
        lines.append("")
    if report.enumerated:
        lines.extend(_summary_block(report))
        lines.append("")
    return "\n".join(lines)
