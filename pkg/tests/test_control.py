from __future__ import annotations

import json
import re
import shutil
from pathlib import Path

import pytest

from voxlog.capture import ConfigError
from voxlog.control import (
    EXIT_INVALID,
    EXIT_OK,
    EXIT_USAGE,
    OP_REQUIRED,
    ConfigFileError,
    load_config,
    parse_config,
    run_scenario,
    summarize_log,
    validate_log,
)
from voxlog.control.main import main
from voxlog.fixtures import TWO_PLAYERS_CONFIG, TWO_PLAYERS_SCENARIO

MINIMAL = """\
config_version = 1
scenario = "s.scenario"
output_dir = "out"
ticks = 40
logfile_seed = 3

[[pollers]]
label = "HIGH_FREQUENCY_LOG_20Hz"
frequency_hz = 20
fields = ["location", "view"]
"""


@pytest.fixture
def fixture_dir(tmp_path):
    shutil.copy(TWO_PLAYERS_SCENARIO, tmp_path / "two_players.scenario")
    shutil.copy(TWO_PLAYERS_CONFIG, tmp_path / "two_players.toml")
    return tmp_path


def _setup(tmp_path, config_text, scenario_text="agent A 0.5 64 0.5 0 0 op\nat 0 A pl-start\n"):
    (tmp_path / "s.scenario").write_text(scenario_text)
    path = tmp_path / "run.toml"
    path.write_text(config_text)
    return path


def test_bundled_config_loads():
    config = load_config(TWO_PLAYERS_CONFIG)
    assert config.ticks == 1200 and config.scenario == TWO_PLAYERS_SCENARIO
    assert [p.frequency_hz for p in config.capture.pollers] == [20, 1]
    assert config.endpoint is None and config.epoch is None


@pytest.mark.parametrize(
    "edit,line,fragment",
    [
        (lambda t: t.replace("frequency_hz = 20", "frequency_hz = 3").replace("_20Hz", "_3Hz"), 9, "divisible"),
        (lambda t: t.replace("config_version = 1", "config_version = 2"), 1, "config_version"),
        (lambda t: t.replace('"view"', '"xray"'), 10, "unknown field selector"),
        (lambda t: t + "colour = 1\n", 11, "colour"),
        (lambda t: t.replace("ticks = 40", "ticks = 40\nduration_s = 2"), 5, "not both"),
        (lambda t: t.replace("ticks = 40", "ticks = [40"), 5, ""),
    ],
)
def test_config_errors_name_file_and_line(tmp_path, edit, line, fragment):
    path = _setup(tmp_path, edit(MINIMAL))
    with pytest.raises(ConfigFileError) as info:
        load_config(path)
    assert str(info.value).startswith(f"{path}:{line}:")
    assert fragment in str(info.value)


def test_bad_config_fails_before_simulating(tmp_path):
    path = _setup(tmp_path, MINIMAL.replace("frequency_hz = 20", "frequency_hz = 3").replace("_20Hz", ""))
    result = run_scenario(path)
    assert result.exit_status == EXIT_USAGE and "3 Hz" in result.diagnostics[0]
    assert not (tmp_path / "out").exists()


def test_zero_participants_is_a_clean_run(tmp_path):
    result = run_scenario(_setup(tmp_path, MINIMAL, "block 0 63 0 STONE\n"))
    assert result.exit_status == EXIT_OK and result.documents == {} and result.finished == []


def test_scenario_errors_exit_usage(tmp_path):
    result = run_scenario(_setup(tmp_path, MINIMAL, "agent A 0 64 0\nat 5 A break 9 9 9\n"))
    assert result.exit_status == EXIT_USAGE and "no block" in result.diagnostics[0]
    result = run_scenario(_setup(tmp_path, MINIMAL, "agent A 0 64 0\nat 5 A fly\n"))
    assert result.exit_status == EXIT_USAGE and "line 2" in result.diagnostics[0]


def test_commands_enforce_operator_rights(tmp_path):
    scenario = (
        "agent A 0.5 64 0.5 0 0 op\nagent B 2.5 64 0.5\n"
        "at 0 B pl-start-op A\nat 0 B pl-start\nat 1 B pl-start\nat 2 A pl-stop-op B\n"
        "at 3 A pl-stop-op B\nat 4 A pl-version\nat 5 console pl-start-op A\n"
    )
    result = run_scenario(_setup(tmp_path, MINIMAL, scenario))
    outcomes = [(c.tick, c.issuer, c.command, c.ok) for c in result.commands]
    assert outcomes == [
        (0, "B", "pl-start-op", False),
        (0, "B", "pl-start", True),
        (1, "B", "pl-start", False),
        (2, "A", "pl-stop-op", True),
        (3, "A", "pl-stop-op", False),
        (4, "A", "pl-version", True),
        (5, "console", "pl-start-op", True),
    ]
    assert result.commands[0].message == f"pl-start-op {OP_REQUIRED}"
    assert result.commands[5].message == "voxlog plugin version 0.1.0"
    assert result.exit_status == EXIT_OK
    b_doc = json.loads(result.documents["B"][0].read_bytes())
    assert [e["game_tick"] for e in b_doc["logs"]] == [0, 1]
    a_doc = json.loads(result.documents["A"][0].read_bytes())
    assert a_doc["logs"][0]["game_tick"] == 5 and len(a_doc["logs"]) == 35


def test_fixture_run_validates_and_summarizes(fixture_dir):
    result = run_scenario(fixture_dir / "two_players.toml")
    assert result.exit_status == EXIT_OK and sorted(result.documents) == ["Alice", "Bob"]
    alice = result.documents["Alice"][0]
    assert alice.name == "Alice_2025-01-01T12-00-00-000Z.json"
    assert validate_log(alice).ok
    summary = summarize_log(alice)
    assert summary.counts["HIGH_FREQUENCY_LOG_20Hz"] == 1200 and summary.rates_hz["HIGH_FREQUENCY_LOG_20Hz"] == 20.0
    assert summary.rates_hz["LOW_FREQUENCY_LOG_1Hz"] == 1.0 and summary.duration_s == 60.0
    assert summary.events["BlockBreakEvent"] == 5


def _mutated(fixture_dir, mutate) -> Path:
    result = run_scenario(fixture_dir / "two_players.toml")
    path = result.documents["Bob"][0]
    doc = json.loads(path.read_bytes())
    mutate(doc)
    path.write_text(json.dumps(doc))
    return path


def test_validate_reports_swapped_ticks(fixture_dir):
    def swap(doc):
        doc["logs"][10]["game_tick"], doc["logs"][11]["game_tick"] = doc["logs"][11]["game_tick"], doc["logs"][10]["game_tick"]

    report = validate_log(_mutated(fixture_dir, swap))
    first = report.violations[0]
    assert first.path == "$.logs[11]" and "at entry 10" in first.rule


def test_validate_reports_missing_metadata_and_foreign_events(fixture_dir):
    report = validate_log(_mutated(fixture_dir, lambda d: d.pop("plugin_version")))
    assert [v.path for v in report.violations] == ["$.plugin_version"]

    def steal(doc):
        event = next(e for e in doc["logs"] if e["type"] == "EVENT_LOG")
        event["event_info"]["player"] = "Alice"

    report = validate_log(_mutated(fixture_dir, steal))
    assert any(v.path.endswith(".event_info.player") for v in report.violations)


def test_cli_exit_codes(fixture_dir, capsys):
    assert main(["version"]) == EXIT_OK and capsys.readouterr().out.strip() == "0.1.0"
    assert main(["frobnicate"]) == EXIT_USAGE
    assert main(["run"]) == EXIT_USAGE
    assert main(["run", "--config", str(fixture_dir / "two_players.toml"), "--duration", "1"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "Alice: 21 entries, 0 dropped" in out and "[tick 0] Alice pl-start: ok" in out
    logs = sorted((fixture_dir / "out" / "PixelLogs").glob("*.json"))
    assert main(["validate", *map(str, logs)]) == EXIT_OK
    assert main(["summarize", "--json", str(logs[0])]) == EXIT_OK
    assert json.loads(capsys.readouterr().out.split("\n", 2)[-1])["counts"]["HIGH_FREQUENCY_LOG_20Hz"] == 20
    logs[0].write_text("{")
    assert main(["validate", str(logs[0])]) == EXIT_INVALID
    assert main(["summarize", str(logs[0])]) == EXIT_INVALID
    assert main(["validate", str(fixture_dir / "missing.json")]) == EXIT_USAGE


def test_cli_run_without_config(tmp_path, capsys):
    (tmp_path / "s.scenario").write_text("agent A 0.5 64 0.5\nat 0 A pl-start\n")
    argv = ["run", "--scenario", str(tmp_path / "s.scenario"), "--output-dir", str(tmp_path), "--ticks", "10"]
    assert main([*argv, "--poller", "POS_10Hz:10:location"]) == EXIT_OK
    assert "A: 5 entries" in capsys.readouterr().out
    assert main([*argv, "--poller", "POS_10Hz:3:location"]) == EXIT_USAGE


def test_config_rejects_nothing_to_capture(tmp_path):
    text = MINIMAL.split("[[pollers]]")[0] + "[events]\nenabled = false\n"
    with pytest.raises(ConfigError):
        parse_config(text, tmp_path / "x.toml")


def test_default_version_is_semver_and_matches_documents(fixture_dir):
    from voxlog import PLUGIN_VERSION

    assert re.fullmatch(r"\d+\.\d+\.\d+(?:-[0-9A-Za-z.-]+)?", PLUGIN_VERSION)
    result = run_scenario(fixture_dir / "two_players.toml")
    assert {json.loads(p[0].read_bytes())["plugin_version"] for p in result.documents.values()} == {PLUGIN_VERSION}
