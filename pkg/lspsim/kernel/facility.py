"""
Tokens, facilities and facility statistics.
"""

from __future__ import annotations

import heapq
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from .events import EventKind


class ServiceOutcome(Enum):
    SERVED = "served"
    ENQUEUED = "enqueued"


@dataclass(eq=False, slots=True)
class Token:
    id: int
    priority: int = 0
    payload: Any = None
    # set while the token waits with a partially consumed service
    service_remaining: float | None = None
    service_time: float = 0.0
    served: float = 0.0
    facility: Facility | None = None
    slot: int | None = None

    def __repr__(self):
        return f"Token(id={self.id}, priority={self.priority})"


@dataclass(slots=True)
class Server:
    busy: bool = False
    token: Token | None = None
    priority: int = 0
    started_at: float = 0.0
    release_at: float = 0.0
    release_event_id: int | None = None


@dataclass(order=True, slots=True)
class QueueEntry:
    # heap key: higher priority first, preempted re-entries ahead of equals, then FIFO
    sort_key: tuple[int, int, int]
    token: Token = field(compare=False)
    priority: int = field(compare=False)
    enqueue_time: float = field(compare=False)
    service_time: float = field(compare=False)
    preempted: bool = field(compare=False, default=False)


@dataclass(slots=True)
class FacilityStats:
    completions: int = 0
    busy_time: float = 0.0
    queue_exits: int = 0
    cumulative_wait: float = 0.0
    max_queue_len: int = 0
    preemptions: int = 0
    # integral of queue length over time
    queue_area: float = 0.0
    last_queue_change: float = 0.0


@dataclass(frozen=True)
class FacilityStatsView:
    name: str
    servers: int
    elapsed: float
    completions: int
    busy_time: float
    queue_exits: int
    cumulative_wait: float
    max_queue_len: int
    preemptions: int
    utilization: float
    mean_wait: float
    mean_queue_length: float


class Facility:
    """
    A multi-server resource with a preemptive priority queue.

    Servers are materialized on first use, so a facility configured with a
    very large server count only costs the servers that were ever busy.
    """

    def __init__(
        self,
        name: str,
        servers: int,
        on_complete: Callable[[Token], None] | None = None,
        completion_kind: EventKind = EventKind.RELEASE,
        timed: bool = True,
    ):
        self.name = name
        self.capacity = servers
        self.completion_kind = completion_kind
        self.timed = timed
        self.servers: list[Server] = []
        self._free: list[int] = []
        self.queue: list[QueueEntry] = []
        self.up = True
        self.stats = FacilityStats()
        self.on_complete = on_complete
        self.busy_count = 0
        self._queue_seq = 0

    def __repr__(self):
        return f"Facility({self.name!r}, servers={self.capacity}, busy={self.busy_count})"

    @property
    def queue_length(self) -> int:
        return len(self.queue)

    @property
    def is_busy(self) -> bool:
        return self.busy_count == self.capacity

    def has_free_server(self) -> bool:
        return self.busy_count < self.capacity

    def take_free_slot(self) -> int:
        if self._free:
            return heapq.heappop(self._free)
        self.servers.append(Server())
        return len(self.servers) - 1

    def give_back_slot(self, slot: int) -> None:
        heapq.heappush(self._free, slot)

    def busy_slots(self):
        for slot, server in enumerate(self.servers):
            if server.busy:
                yield slot, server

    def push_queue(self, token: Token, priority: int, now: float, service_time: float, preempted: bool) -> None:
        self._account_queue(now)
        self._queue_seq += 1
        entry = QueueEntry(
            sort_key=(-priority, 0 if preempted else 1, self._queue_seq),
            token=token,
            priority=priority,
            enqueue_time=now,
            service_time=service_time,
            preempted=preempted,
        )
        heapq.heappush(self.queue, entry)
        if len(self.queue) > self.stats.max_queue_len:
            self.stats.max_queue_len = len(self.queue)

    def pop_queue(self, now: float) -> QueueEntry:
        self._account_queue(now)
        return heapq.heappop(self.queue)

    def drain_queue(self, now: float) -> list[QueueEntry]:
        self._account_queue(now)
        entries = sorted(self.queue)
        self.queue.clear()
        return entries

    def _account_queue(self, now: float) -> None:
        stats = self.stats
        stats.queue_area += len(self.queue) * (now - stats.last_queue_change)
        stats.last_queue_change = now
