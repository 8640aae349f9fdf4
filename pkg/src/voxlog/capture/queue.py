"""Bounded capture queues with drop-newest overflow.

``CaptureQueue`` is single-producer/single-consumer: the producer is the
only writer of the tail and of the offer counters, the consumer the only
remover, and ``collections.deque`` append/popleft are atomic under the
GIL, so neither side takes a lock. Occupancy read by the producer can only
be stale-high (the consumer only shrinks it), which errs towards dropping,
never towards exceeding capacity.

``SharedQueue`` is the multi-producer variant: every operation holds one
lock, which is what the centralized architecture pays for.
"""

from __future__ import annotations

import threading
from collections import deque
from typing import Any, Generic, TypeVar

T = TypeVar("T")

DEFAULT_CAPACITY = 65_536


class CaptureQueue(Generic[T]):
    def __init__(self, capacity: int = DEFAULT_CAPACITY):
        if capacity <= 0:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._items: deque[T] = deque()
        self.offered = 0
        self.accepted = 0
        self.dropped_count = 0
        self._next_seq = 0

    def __len__(self) -> int:
        return len(self._items)

    def offer(self, entry: T) -> bool:
        """Append ``entry`` unless full; never blocks. Returns False on drop.

        Entries with a writable ``seq`` attribute receive the next sequence
        number on acceptance.
        """
        self.offered += 1
        if len(self._items) >= self.capacity:
            self.dropped_count += 1
            return False
        seq = self._next_seq
        self._next_seq = seq + 1
        if hasattr(entry, "seq"):
            entry.seq = seq  # type: ignore[attr-defined]
        self._items.append(entry)
        self.accepted += 1
        return True

    def drain(self, limit: int | None = None) -> list[T]:
        """Remove up to ``limit`` entries (all if None) in FIFO order."""
        items = self._items
        out: list[T] = []
        n = len(items) if limit is None else min(limit, len(items))
        popleft = items.popleft
        for _ in range(n):
            out.append(popleft())
        return out

    def stats(self) -> dict[str, Any]:
        return {
            "capacity": self.capacity,
            "offered": self.offered,
            "accepted": self.accepted,
            "dropped": self.dropped_count,
            "occupancy": len(self._items),
        }


class SharedQueue(CaptureQueue[T]):
    """Lock-protected queue safe for many producers and consumers."""

    def __init__(self, capacity: int = DEFAULT_CAPACITY):
        super().__init__(capacity)
        self._lock = threading.Lock()

    def offer(self, entry: T) -> bool:
        with self._lock:
            return CaptureQueue.offer(self, entry)

    def drain(self, limit: int | None = None) -> list[T]:
        with self._lock:
            return CaptureQueue.drain(self, limit)
