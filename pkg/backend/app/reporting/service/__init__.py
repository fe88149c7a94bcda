"""Report Export Service Module"""
from .report_export_service import ReportExportService

__all__ = ["ReportExportService"]
