"""TCP forwarding of finished session documents, and the receiving sink."""

from voxlog.transport.client import Endpoint, RetryPolicy, TransmitResult, transmit_session
from voxlog.transport.framing import (
    DEFAULT_MAX_FRAME,
    FrameDecoder,
    FrameError,
    OversizeFrame,
    TruncatedFrame,
    frame_decode,
    frame_encode,
)
from voxlog.transport.sink import RunningSink, SinkConfig, SinkServer, sink_serve

__all__ = [
    "DEFAULT_MAX_FRAME",
    "Endpoint",
    "FrameDecoder",
    "FrameError",
    "OversizeFrame",
    "RetryPolicy",
    "RunningSink",
    "SinkConfig",
    "SinkServer",
    "TransmitResult",
    "TruncatedFrame",
    "frame_decode",
    "frame_encode",
    "sink_serve",
    "transmit_session",
]
