"""Reporting Module (SVG charts)"""
from .svg_chart import SUBSET_COLORS, SUBSET_ORDER, axis_limits, heat_grid, line_chart
from .service import ReportExportService

__all__ = ["SUBSET_COLORS", "SUBSET_ORDER", "axis_limits", "heat_grid", "line_chart", "ReportExportService"]
