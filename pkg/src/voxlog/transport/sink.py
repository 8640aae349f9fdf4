"""Archival sink: accepts framed session documents over TCP and files them.

Each connection is handled on its own thread. A frame that parses as a
valid session document lands in ``<storage>/received/<filename>.json``;
anything else (bad JSON, schema violations, truncated or oversize frames)
goes to ``<storage>/quarantine/`` next to a ``.reason.txt`` explaining why.
"""

from __future__ import annotations

import itertools
import logging
import os
import socket
import socketserver
import threading
from dataclasses import dataclass
from pathlib import Path

from voxlog.assembler.codec import SessionParseError, parse_session
from voxlog.assembler.schema import SchemaError
from voxlog.assembler.store import write_atomic
from voxlog.transport.framing import DEFAULT_MAX_FRAME, FrameDecoder, FrameError

log = logging.getLogger(__name__)

ENV_PREFIX = "VOXLOG_SINK_"


@dataclass(frozen=True)
class SinkConfig:
    host: str = "127.0.0.1"
    port: int = 9400
    storage: Path = Path("sink-storage")
    max_frame: int = DEFAULT_MAX_FRAME
    read_timeout_s: float = 30.0

    def __post_init__(self) -> None:
        if not 0 <= self.port <= 65535:
            # port 0 asks the OS for an ephemeral port
            raise ValueError(f"port {self.port} outside [0, 65535]")
        if self.max_frame <= 0:
            raise ValueError("max frame size must be positive")

    @classmethod
    def from_env(cls, **overrides: object) -> SinkConfig:
        """Defaults, then ``VOXLOG_SINK_*`` variables, then explicit overrides."""
        values: dict[str, object] = {}
        env = os.environ
        if ENV_PREFIX + "HOST" in env:
            values["host"] = env[ENV_PREFIX + "HOST"]
        if ENV_PREFIX + "PORT" in env:
            values["port"] = int(env[ENV_PREFIX + "PORT"])
        if ENV_PREFIX + "STORAGE" in env:
            values["storage"] = Path(env[ENV_PREFIX + "STORAGE"])
        if ENV_PREFIX + "MAX_FRAME" in env:
            values["max_frame"] = int(env[ENV_PREFIX + "MAX_FRAME"])
        if ENV_PREFIX + "READ_TIMEOUT" in env:
            values["read_timeout_s"] = float(env[ENV_PREFIX + "READ_TIMEOUT"])
        values.update({k: v for k, v in overrides.items() if v is not None})
        if "storage" in values:
            values["storage"] = Path(values["storage"])  # type: ignore[arg-type]
        return cls(**values)  # type: ignore[arg-type]


class SinkStorage:
    def __init__(self, root: Path):
        self.root = Path(root)
        self.received = self.root / "received"
        self.quarantine = self.root / "quarantine"
        self.received.mkdir(parents=True, exist_ok=True)
        self.quarantine.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._counter = itertools.count()

    def _claim(self, directory: Path, stem: str) -> Path:
        # exclusive create makes name claims atomic across handler threads
        with self._lock:
            for n in itertools.count():
                name = stem if n == 0 else f"{stem}-{n}"
                path = directory / f"{name}.json"
                try:
                    fd = os.open(path, os.O_CREAT | os.O_EXCL | os.O_WRONLY, 0o644)
                except FileExistsError:
                    continue
                os.close(fd)
                return path
        raise AssertionError("unreachable")

    def store(self, filename: str, data: bytes) -> Path:
        path = self._claim(self.received, filename)
        return write_atomic(path, data)

    def quarantine_bytes(self, data: bytes, reason: str, peer: str) -> Path:
        stem = f"frame-{os.getpid()}-{next(self._counter):06d}"
        path = self._claim(self.quarantine, stem)
        write_atomic(path, data)
        write_atomic(path.with_suffix(".reason.txt"), f"peer: {peer}\nreason: {reason}\n".encode("utf-8"))
        return path


class _Handler(socketserver.BaseRequestHandler):
    server: SinkServer

    def handle(self) -> None:
        srv = self.server
        sock: socket.socket = self.request
        sock.settimeout(srv.config.read_timeout_s)
        peer = "%s:%s" % self.client_address[:2]
        decoder = FrameDecoder(srv.config.max_frame)
        try:
            while True:
                try:
                    chunk = sock.recv(65536)
                except (socket.timeout, OSError) as exc:
                    srv.quarantine(decoder.partial(), f"read failed: {exc}", peer)
                    return
                if not chunk:
                    break
                try:
                    payloads = decoder.feed(chunk)
                except FrameError as exc:
                    srv.quarantine(b"", str(exc), peer)
                    return
                for payload in payloads:
                    srv.accept_payload(payload, peer)
            try:
                decoder.close()
            except FrameError as exc:
                srv.quarantine(decoder.partial(), str(exc), peer)
        except Exception:  # a handler must never take the server down
            log.exception("connection from %s failed", peer)
            srv.stats["errors"] += 1


class SinkServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = False
    block_on_close = True

    def __init__(self, config: SinkConfig):
        self.config = config
        self.storage = SinkStorage(config.storage)
        self.stats = {"received": 0, "quarantined": 0, "errors": 0}
        self._stats_lock = threading.Lock()
        super().__init__((config.host, config.port), _Handler)

    @property
    def port(self) -> int:
        return self.server_address[1]

    def accept_payload(self, payload: bytes, peer: str) -> Path | None:
        try:
            document = parse_session(payload)
        except (SessionParseError, SchemaError) as exc:
            self.quarantine(payload, f"invalid session document: {exc}", peer)
            return None
        path = self.storage.store(document.metadata.filename, payload)
        with self._stats_lock:
            self.stats["received"] += 1
        log.info("stored %s from %s", path.name, peer)
        return path

    def quarantine(self, data: bytes, reason: str, peer: str) -> Path:
        path = self.storage.quarantine_bytes(data, reason, peer)
        with self._stats_lock:
            self.stats["quarantined"] += 1
        log.warning("quarantined %s from %s: %s", path.name, peer, reason)
        return path


def sink_serve(config: SinkConfig, ready: threading.Event | None = None, stop: threading.Event | None = None) -> SinkServer:
    """Run the sink until ``stop`` is set (or forever); drains in-flight connections on exit.

    Bind failures raise OSError before anything is served.
    """
    server = SinkServer(config)
    if ready is not None:
        ready.set()
    if stop is None:
        try:
            server.serve_forever()
        finally:
            server.server_close()
        return server
    thread = threading.Thread(target=server.serve_forever, name="sink-accept", daemon=True)
    thread.start()
    try:
        stop.wait()
    finally:
        server.shutdown()
        server.server_close()
        thread.join()
    return server


class RunningSink:
    """Context manager running a sink on a background thread (tests, embedding)."""

    def __init__(self, config: SinkConfig):
        self.server = SinkServer(config)
        self._thread = threading.Thread(target=self.server.serve_forever, name="sink-accept", daemon=True)

    def __enter__(self) -> SinkServer:
        self._thread.start()
        return self.server

    def __exit__(self, *exc: object) -> None:
        self.server.shutdown()
        self.server.server_close()  # joins handler threads
        self._thread.join()
