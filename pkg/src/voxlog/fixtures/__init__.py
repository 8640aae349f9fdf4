"""Bundled scenario, run configuration and bench profiles."""

from pathlib import Path

FIXTURES = Path(__file__).resolve().parent
TWO_PLAYERS_CONFIG = FIXTURES / "two_players.toml"
TWO_PLAYERS_SCENARIO = FIXTURES / "two_players.scenario"
CONTENDED_PROFILE = FIXTURES / "contended.bench.toml"
PEAK_PROFILE = FIXTURES / "peak.bench.toml"
