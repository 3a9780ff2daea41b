"""
Reporting package for the optimal portfolio constructor.
Renders ranking reports and the step-by-step calculation trace.
"""
from reporting.renderers import render_report, report_document, select_records
from reporting.trace import TraceRecord, build_trace, emit_trace

__all__ = [
    'render_report', 'report_document', 'select_records',
    'TraceRecord', 'build_trace', 'emit_trace'
]
