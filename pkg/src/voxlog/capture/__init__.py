"""Session lifecycle, stratified pollers, event filtering and bounded queues."""

from voxlog.capture.cadence import Cadence, ConfigError, cadence_for
from voxlog.capture.pipeline import CaptureConfig, ParticipantPipeline, PipelineState, filter_event
from voxlog.capture.poller import (
    FieldSelector,
    ParticipantAbsent,
    PollerSpec,
    SelectorSettings,
    poll_state,
)
from voxlog.capture.queue import DEFAULT_CAPACITY, CaptureQueue, SharedQueue
from voxlog.capture.session import DrainWorker, FinishedSession, SessionError, SessionHandle, SessionManager

__all__ = [
    "DEFAULT_CAPACITY",
    "Cadence",
    "CaptureConfig",
    "CaptureQueue",
    "ConfigError",
    "DrainWorker",
    "FieldSelector",
    "FinishedSession",
    "ParticipantAbsent",
    "ParticipantPipeline",
    "PipelineState",
    "PollerSpec",
    "SelectorSettings",
    "SessionError",
    "SessionHandle",
    "SessionManager",
    "SharedQueue",
    "cadence_for",
    "filter_event",
    "poll_state",
]
