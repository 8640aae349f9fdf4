from __future__ import annotations

import logging
import socket
import time
from dataclasses import dataclass

from voxlog.transport.framing import DEFAULT_MAX_FRAME, frame_encode

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RetryPolicy:
    attempts: int = 3
    backoff_ms: tuple[int, ...] = (100, 200, 400)
    timeout_s: float = 10.0

    def delay_after(self, attempt: int) -> float:
        """Seconds to wait after failed attempt number ``attempt`` (0-based)."""
        if not self.backoff_ms:
            return 0.0
        return self.backoff_ms[min(attempt, len(self.backoff_ms) - 1)] / 1000.0


@dataclass(frozen=True)
class Endpoint:
    host: str
    port: int

    def __post_init__(self) -> None:
        if not 1 <= self.port <= 65535:
            raise ValueError(f"port {self.port} outside [1, 65535]")

    @classmethod
    def parse(cls, text: str) -> Endpoint:
        host, sep, port = text.rpartition(":")
        if not sep or not host:
            raise ValueError(f"endpoint must be HOST:PORT, got {text!r}")
        return cls(host.strip("[]"), int(port))


@dataclass(frozen=True)
class TransmitResult:
    delivered: bool
    attempts: int
    error: str | None = None

    @property
    def outcome(self) -> str:
        return "delivered" if self.delivered else "fallback-to-disk"


def _send_once(data: bytes, endpoint: Endpoint, timeout: float) -> None:
    with socket.create_connection((endpoint.host, endpoint.port), timeout=timeout) as sock:
        sock.sendall(data)
        sock.shutdown(socket.SHUT_WR)
        # The sink closes after consuming the stream; a reset here means it
        # bailed out before reading everything.
        while sock.recv(4096):
            pass


def transmit_session(
    document: bytes,
    endpoint: Endpoint,
    policy: RetryPolicy = RetryPolicy(),
    *,
    max_frame: int = DEFAULT_MAX_FRAME,
    sleep=time.sleep,
) -> TransmitResult:
    """Send one framed document; on repeated failure report fallback.

    The caller is expected to have persisted the document locally first;
    nothing here touches local files.
    """
    data = frame_encode(document, max_frame)
    error = None
    for attempt in range(policy.attempts):
        try:
            _send_once(data, endpoint, policy.timeout_s)
            return TransmitResult(True, attempt + 1)
        except OSError as exc:
            error = f"{type(exc).__name__}: {exc}"
            log.info("transmit attempt %d to %s:%d failed: %s", attempt + 1, endpoint.host, endpoint.port, error)
            if attempt + 1 < policy.attempts:
                sleep(policy.delay_after(attempt))
    return TransmitResult(False, policy.attempts, error)
