from __future__ import annotations

import csv
import io
import json
import shutil

import pytest

from voxlog.bench import (
    REPORT_KEYS,
    Architecture,
    LoadProfile,
    compare_architectures,
    emit_report,
    load_profile,
    offer_schedule,
    parse_profile,
    run_load,
)
from voxlog.bench.load import _drain_round_robin
from voxlog.bench.report import ReportFormatError
from voxlog.capture import CaptureQueue
from voxlog.control.main import main
from voxlog.fixtures import CONTENDED_PROFILE


def drop_oracle(profile: LoadProfile) -> int:
    """Counting model of the windowed bench without threads or queues."""
    n = profile.participants
    total = profile.total_capacity
    caps = [total // n + (1 if i < total % n else 0) for i in range(n)]
    if profile.architecture is Architecture.CENTRALIZED:
        caps = [total]
    occupancy = [0] * len(caps)
    dropped = 0
    rate = profile.service_per_ms
    for w, count in enumerate(offer_schedule(profile)):
        offers = [count * n] if len(caps) == 1 else [count] * n
        for i, k in enumerate(offers):
            took = min(k, caps[i] - occupancy[i])
            occupancy[i] += took
            dropped += k - took
        if rate is None:
            occupancy = [0] * len(caps)
            continue
        budget = int(rate * profile.window_ms + 1e-9)
        while budget and any(occupancy):
            live = [i for i, o in enumerate(occupancy) if o]
            share = max(1, budget // len(live))
            for i in live:
                take = min(share, occupancy[i], budget)
                occupancy[i] -= take
                budget -= take
                if not budget:
                    break
    return dropped


def test_schedule_counts():
    profile = LoadProfile(1, "distributed", (20, 1), event_rate_hz=5, duration_s=60, window_ms=50)
    assert sum(offer_schedule(profile)) == 1200 + 60 + 300


def test_single_participant_uncontended():
    report = run_load(LoadProfile(1, "distributed", duration_s=60))
    assert (report.offered, report.dropped, report.drop_rate) == (1200, 0, 0.0)
    assert report.latency_samples == 1200 and report.latency_p50_ns <= report.latency_p99_ns


@pytest.mark.parametrize("arch", list(Architecture))
@pytest.mark.parametrize("capacity", [16, 64, 256, 1024])
def test_drops_match_counting_oracle(arch, capacity):
    profile = LoadProfile(4, arch, (20,), event_rate_hz=20, duration_s=5, queue_capacity=capacity, service_fraction=0.5, window_ms=250)
    report = run_load(profile)
    assert report.dropped == drop_oracle(profile)
    assert report.offered == report.accepted + report.dropped == 4 * 200
    assert sum(p.dropped for p in report.per_participant) == report.dropped


def test_more_capacity_never_drops_more():
    drops = [
        run_load(LoadProfile(3, "distributed", duration_s=3, queue_capacity=c, service_fraction=0.3, window_ms=100)).dropped
        for c in (3, 12, 48, 192, 768)
    ]
    assert drops == sorted(drops, reverse=True) and drops[0] > 0 and drops[-1] == 0


def test_round_robin_is_work_conserving():
    queues = [CaptureQueue(100) for _ in range(3)]
    for q, k in zip(queues, (1, 10, 10)):
        for i in range(k):
            q.offer(i)
    assert _drain_round_robin(queues, 12, 0) == 12
    assert [len(q) for q in queues] == [0, 4, 5]
    assert _drain_round_robin(queues, 100, 1) == 9


def test_one_participant_arms_account_identically():
    cmp = compare_architectures(LoadProfile(1, "centralized", duration_s=5, queue_capacity=30, service_fraction=0.5, window_ms=500))
    assert cmp.centralized.dropped == cmp.distributed.dropped > 0
    with pytest.raises(ValueError):
        compare_architectures(LoadProfile(2, "centralized"), LoadProfile(3, "distributed"))


def test_report_formats():
    report = run_load(LoadProfile(2, "centralized", duration_s=1))
    rows = list(csv.DictReader(io.StringIO(emit_report(report, "csv").decode())))
    assert [r["scope"] for r in rows] == ["total", "participant-0", "participant-1"]
    assert int(rows[0]["offered"]) == 40 and float(rows[0]["latency_p99_ns"]) == report.latency_p99_ns
    data = json.loads(emit_report(report, "json"))
    assert set(data) == {*REPORT_KEYS, "per_participant"}
    assert emit_report(report, "text").decode().startswith("architecture")
    with pytest.raises(ReportFormatError, match="unknown report format 'xml'"):
        emit_report(report, "xml")


def test_profile_parsing():
    profile = load_profile(CONTENDED_PROFILE)
    assert (profile.participants, profile.total_capacity, profile.architecture) == (10, 250, Architecture.DISTRIBUTED)
    for bad in ("[profile]\nparticipants = 0\n", "[profile]\nusers = 3\n", "[profile\n", "[profile]\n"):
        with pytest.raises(ValueError):
            parse_profile(bad)


def test_cli_bench_writes_reports(tmp_path, capsys):
    profile = tmp_path / "p.bench.toml"
    profile.write_text("[profile]\nparticipants = 2\nduration_s = 1\n")
    assert main(["bench", "compare", "--profile", str(profile), "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["distributed_drops_le"] is True
    assert sorted(p.name for p in tmp_path.glob("p.bench.compare.*")) == [
        "p.bench.compare.csv",
        "p.bench.compare.json",
        "p.bench.compare.txt",
    ]
    shutil.copy(CONTENDED_PROFILE, tmp_path / "c.toml")
    assert main(["bench", "run", "--profile", str(tmp_path / "c.toml"), "--architecture", "centralized"]) == 0
    assert main(["bench", "run", "--profile", str(tmp_path / "missing.toml")]) == 1
