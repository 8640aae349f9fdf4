"""Length-prefixed frames: a 4-byte big-endian length, then the payload."""

from __future__ import annotations

import struct
from typing import Iterable, Iterator

HEADER = struct.Struct(">I")
DEFAULT_MAX_FRAME = 256 * 1024 * 1024


class FrameError(ValueError):
    pass


class OversizeFrame(FrameError):
    def __init__(self, size: int, limit: int):
        super().__init__(f"frame of {size} bytes exceeds the {limit}-byte limit")
        self.size = size
        self.limit = limit


class TruncatedFrame(FrameError):
    def __init__(self, expected: int, received: int):
        super().__init__(f"stream ended mid-frame: expected {expected} bytes, received {received}")
        self.expected = expected
        self.received = received


def frame_encode(payload: bytes, max_frame: int = DEFAULT_MAX_FRAME) -> bytes:
    size = len(payload)
    if size > max_frame or size > 0xFFFFFFFF:
        raise OversizeFrame(size, max_frame)
    return HEADER.pack(size) + payload


class FrameDecoder:
    """Incremental decoder; feed arbitrary chunks, collect whole payloads."""

    def __init__(self, max_frame: int = DEFAULT_MAX_FRAME):
        self.max_frame = max_frame
        self._buf = bytearray()
        self._need: int | None = None

    @property
    def pending(self) -> int:
        """Bytes buffered towards an incomplete frame."""
        return len(self._buf)

    def feed(self, chunk: bytes) -> list[bytes]:
        self._buf += chunk
        out: list[bytes] = []
        while True:
            if self._need is None:
                if len(self._buf) < HEADER.size:
                    return out
                (size,) = HEADER.unpack_from(self._buf)
                if size > self.max_frame:
                    raise OversizeFrame(size, self.max_frame)
                del self._buf[: HEADER.size]
                self._need = size
            if len(self._buf) < self._need:
                return out
            out.append(bytes(self._buf[: self._need]))
            del self._buf[: self._need]
            self._need = None

    def close(self) -> None:
        """Declare end of stream; raises if a frame is incomplete."""
        if self._need is not None:
            raise TruncatedFrame(HEADER.size + self._need, HEADER.size + len(self._buf))
        if self._buf:
            raise TruncatedFrame(HEADER.size, len(self._buf))

    def partial(self) -> bytes:
        return bytes(self._buf)


def frame_decode(chunks: Iterable[bytes], max_frame: int = DEFAULT_MAX_FRAME) -> Iterator[bytes]:
    """Payloads from a stream given as an iterable of byte chunks."""
    decoder = FrameDecoder(max_frame)
    for chunk in chunks:
        yield from decoder.feed(chunk)
    decoder.close()
