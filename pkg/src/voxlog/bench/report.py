"""Report rendering and bench profile files.

Column/key set (stable across versions of this module):

    architecture, participants, offered, accepted, dropped, drop_rate,
    latency_p50_ns, latency_p99_ns, latency_samples, throughput_eps, wall_s

JSON reports add ``per_participant`` (participant, offered, accepted,
dropped). CSV has one ``total`` row followed by one row per participant,
with a leading ``scope`` column; per-participant rows leave the latency
and throughput columns empty.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from voxlog.bench.load import BenchReport, Comparison, LoadProfile

REPORT_KEYS = (
    "architecture",
    "participants",
    "offered",
    "accepted",
    "dropped",
    "drop_rate",
    "latency_p50_ns",
    "latency_p99_ns",
    "latency_samples",
    "throughput_eps",
    "wall_s",
)
PARTICIPANT_KEYS = ("participant", "offered", "accepted", "dropped")
FORMATS = ("text", "csv", "json")


class ReportFormatError(ValueError):
    pass


def _text(report: BenchReport) -> str:
    rows = [(key, getattr(report, key)) for key in REPORT_KEYS]
    width = max(len(k) for k, _ in rows)
    lines = [f"{k:<{width}}  {v:.6g}" if isinstance(v, float) else f"{k:<{width}}  {v}" for k, v in rows]
    lines.append("")
    lines.append(f"{'participant':>11} {'offered':>10} {'accepted':>10} {'dropped':>10}")
    lines.extend(f"{p.participant:>11} {p.offered:>10} {p.accepted:>10} {p.dropped:>10}" for p in report.per_participant)
    return "\n".join(lines) + "\n"


def _csv(report: BenchReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("scope", *REPORT_KEYS))
    writer.writerow(("total", *(getattr(report, k) for k in REPORT_KEYS)))
    for p in report.per_participant:
        row = {k: "" for k in REPORT_KEYS}
        row.update(architecture=report.architecture, participants=1, offered=p.offered, accepted=p.accepted, dropped=p.dropped)
        row["drop_rate"] = p.dropped / p.offered if p.offered else 0.0
        writer.writerow((f"participant-{p.participant}", *row.values()))
    return buf.getvalue()


def emit_report(report: BenchReport | Comparison, fmt: str = "text") -> bytes:
    if fmt not in FORMATS:
        raise ReportFormatError(f"unknown report format {fmt!r}; choose one of {', '.join(FORMATS)}")
    if isinstance(report, Comparison):
        if fmt == "json":
            return json.dumps(report.as_dict(), indent=2).encode("utf-8")
        parts = [emit_report(report.centralized, fmt).decode("utf-8"), emit_report(report.distributed, fmt).decode("utf-8")]
        if fmt == "csv":
            # one header for both arms
            parts[1] = parts[1].split("\n", 1)[1]
            return "".join(parts).encode("utf-8")
        verdict = (
            f"drop rate delta (distributed - centralized): {report.drop_rate_delta:+.6g}\n"
            f"p99 delta ns (distributed - centralized):    {report.p99_delta_ns:+.6g}\n"
            f"distributed <= centralized on drops: {report.distributed_drops_le}\n"
            f"distributed <= centralized on p99:   {report.distributed_p99_le}\n"
        )
        return "\n".join([*parts, verdict]).encode("utf-8")
    if fmt == "json":
        return json.dumps(report.as_dict(), indent=2).encode("utf-8")
    if fmt == "csv":
        return _csv(report).encode("utf-8")
    return _text(report).encode("utf-8")


_PROFILE_KEYS = {
    "participants",
    "architecture",
    "frequencies_hz",
    "event_rate_hz",
    "duration_s",
    "queue_capacity",
    "service_rate_per_ms",
    "service_fraction",
    "window_ms",
}


def parse_profile(text: str, source: str = "<profile>") -> LoadProfile:
    """A TOML table ``[profile]`` whose keys mirror :class:`LoadProfile`.

    ``architecture`` may be omitted for ``bench compare``; it defaults to
    ``distributed``.
    """
    try:
        raw: dict[str, Any] = tomllib.loads(text).get("profile", {})
    except tomllib.TOMLDecodeError as exc:
        raise ValueError(f"{source}: not valid TOML: {exc}") from None
    unknown = set(raw) - _PROFILE_KEYS
    if unknown:
        raise ValueError(f"{source}: unknown profile keys {sorted(unknown)}")
    raw.setdefault("architecture", "distributed")
    if "participants" not in raw:
        raise ValueError(f"{source}: profile.participants is required")
    try:
        return LoadProfile(**raw)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{source}: {exc}") from None


def load_profile(path: str | Path) -> LoadProfile:
    path = Path(path)
    return parse_profile(path.read_text(encoding="utf-8"), str(path))


def write_reports(report: BenchReport | Comparison, profile_path: str | Path, tag: str) -> list[Path]:
    """Write text, csv and json renderings beside the profile file."""
    profile_path = Path(profile_path)
    written = []
    for fmt, ext in (("text", "txt"), ("csv", "csv"), ("json", "json")):
        target = profile_path.with_name(f"{profile_path.stem}.{tag}.{ext}")
        target.write_bytes(emit_report(report, fmt))
        written.append(target)
    return written
