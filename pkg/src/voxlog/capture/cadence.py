from __future__ import annotations

from dataclasses import dataclass


class ConfigError(ValueError):
    """Invalid capture configuration."""


@dataclass(frozen=True)
class Cadence:
    """Sampling schedule on the simulated millisecond clock.

    Samples fire at every simulated time ``t`` (ms since the world epoch)
    with ``t % period_ms == 0``; each is stamped ``game_tick = t // tick_ms``.
    Above the tick rate several samples land in one tick and repeat that
    tick's committed state.
    """

    frequency_hz: int
    period_ms: int
    tick_ms: int

    @property
    def samples_per_tick(self) -> float:
        return self.tick_ms / self.period_ms

    def first_at_or_after(self, t_ms: int) -> int:
        return -(-t_ms // self.period_ms) * self.period_ms

    def instants_in_tick(self, tick: int) -> range:
        start = tick * self.tick_ms
        return range(self.first_at_or_after(start), start + self.tick_ms, self.period_ms)

    def tick_of(self, t_ms: int) -> int:
        return t_ms // self.tick_ms


def cadence_for(frequency_hz: int, tick_rate: int = 20) -> Cadence:
    if isinstance(frequency_hz, bool) or not isinstance(frequency_hz, int) or frequency_hz < 1:
        raise ConfigError(f"frequency must be a positive integer number of Hz, got {frequency_hz!r}")
    if 1000 % frequency_hz:
        raise ConfigError(
            f"frequency {frequency_hz} Hz does not give a whole-millisecond period: 1000 must be divisible by the frequency"
        )
    if 1000 % tick_rate:
        raise ConfigError(f"tick rate {tick_rate} does not divide 1000")
    return Cadence(frequency_hz, 1000 // frequency_hz, 1000 // tick_rate)
