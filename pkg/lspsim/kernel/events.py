"""
Events and the event chain.

The chain is a binary heap keyed by (fire_time, seq) with an id index, so
cancellation is O(1) and cancelled entries are discarded lazily on pop.
"""

from __future__ import annotations

import heapq
from enum import IntEnum
from typing import Any


class EventKind(IntEnum):
    SOURCE_ARRIVAL = 1
    LINK_TRANSMIT_REQUEST = 2
    PROPAGATE = 3
    NODE_ARRIVAL = 4
    CONTROL_ARRIVAL = 5
    REFRESH_LSP_STATES = 6
    GENERATE_HELLO = 7
    TIMEOUT_TRIGGER = 8
    START_GENERATOR = 9
    END_SIMULATION = 10
    # kernel-internal: a facility server finishes its service
    RELEASE = 100


class Event:
    __slots__ = ("id", "kind", "fire_time", "token", "seq", "cancelled")

    def __init__(self, event_id: int, kind: EventKind, fire_time: float, token: Any, seq: int):
        self.id = event_id
        self.kind = kind
        self.fire_time = fire_time
        self.token = token
        self.seq = seq
        self.cancelled = False

    def __lt__(self, other: Event) -> bool:
        if self.fire_time != other.fire_time:
            return self.fire_time < other.fire_time
        return self.seq < other.seq

    def __repr__(self):
        return f"Event(id={self.id}, kind={self.kind.name}, t={self.fire_time!r}, seq={self.seq})"


class EventChain:
    def __init__(self):
        self._heap: list[tuple[float, int, Event]] = []
        self._live: dict[int, Event] = {}

    def __len__(self):
        return len(self._live)

    def __contains__(self, event_id: int):
        return event_id in self._live

    def push(self, event: Event) -> None:
        self._live[event.id] = event
        heapq.heappush(self._heap, (event.fire_time, event.seq, event))

    def pop(self) -> Event | None:
        heap = self._heap
        while heap:
            _, _, event = heapq.heappop(heap)
            if event.cancelled:
                continue
            del self._live[event.id]
            return event
        return None

    def remove(self, event_id: int) -> bool:
        event = self._live.pop(event_id, None)
        if event is None:
            return False
        event.cancelled = True
        return True

    def get(self, event_id: int) -> Event | None:
        return self._live.get(event_id)

    def peek_time(self) -> float | None:
        heap = self._heap
        while heap and heap[0][2].cancelled:
            heapq.heappop(heap)
        return heap[0][0] if heap else None
