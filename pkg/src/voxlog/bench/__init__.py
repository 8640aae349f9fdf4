from voxlog.bench.load import (
    Architecture,
    BenchReport,
    Comparison,
    LoadProfile,
    compare_architectures,
    offer_schedule,
    run_load,
)
from voxlog.bench.report import FORMATS, REPORT_KEYS, emit_report, load_profile, parse_profile, write_reports

__all__ = [
    "Architecture",
    "BenchReport",
    "Comparison",
    "FORMATS",
    "LoadProfile",
    "REPORT_KEYS",
    "compare_architectures",
    "emit_report",
    "load_profile",
    "offer_schedule",
    "parse_profile",
    "run_load",
    "write_reports",
]
