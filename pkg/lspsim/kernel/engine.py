"""
The queuing kernel: clock, event chain, facilities and random streams.

A Kernel instance owns all of its state, so independent simulations can run
side by side in one process.
"""

from __future__ import annotations

import math
from collections.abc import Callable

from lspsim.errors import DefinitionError, FacilityError, SchedulingError

from .events import Event, EventChain, EventKind
from .facility import Facility, FacilityStatsView, ServiceOutcome, Token
from .random import RngStream


class Kernel:
    def __init__(self, seed: int = 0, trace: Callable[[Event], None] | None = None):
        self.seed = seed
        self.clock = 0.0
        self.trace = trace
        self.events_caused = 0
        self.facilities: dict[str, Facility] = {}
        self._chain = EventChain()
        self._streams: dict[int, RngStream] = {}
        self._last_event_id = 0
        self._last_seq = 0
        self._last_token_id = 0

    def __repr__(self):
        return f"Kernel(clock={self.clock!r}, pending={len(self._chain)})"

    # Events

    def schedule(self, kind: EventKind, delay: float, token=None) -> int:
        if not math.isfinite(delay) or delay < 0:
            raise SchedulingError(f"cannot schedule {kind.name} with delay {delay!r}")
        self._last_event_id += 1
        self._last_seq += 1
        event = Event(self._last_event_id, kind, self.clock + delay, token, self._last_seq)
        self._chain.push(event)
        return event.id

    def cause(self) -> Event | None:
        """
        Remove the next event from the chain and advance the clock to it.

        Returns None once the chain is empty.
        """
        event = self._chain.pop()
        if event is None:
            return None
        self.clock = event.fire_time
        self.events_caused += 1
        if self.trace is not None:
            self.trace(event)
        return event

    def cancel(self, event_id: int) -> bool:
        return self._chain.remove(event_id)

    def pending(self) -> int:
        return len(self._chain)

    def peek_time(self) -> float | None:
        return self._chain.peek_time()

    def fire_time(self, event_id: int) -> float | None:
        event = self._chain.get(event_id)
        return event.fire_time if event is not None else None

    # Tokens and streams

    def new_token(self, priority: int = 0, payload=None) -> Token:
        self._last_token_id += 1
        return Token(id=self._last_token_id, priority=priority, payload=payload)

    def stream(self, stream_id: int) -> RngStream:
        stream = self._streams.get(stream_id)
        if stream is None:
            stream = self._streams[stream_id] = RngStream(self.seed, stream_id)
        return stream

    # Facilities

    def define_facility(
        self,
        name: str,
        servers: int,
        on_complete: Callable[[Token], None] | None = None,
        *,
        completion_kind: EventKind = EventKind.RELEASE,
        timed: bool = True,
    ) -> Facility:
        """
        Define a facility with `servers` servers.

        A timed facility fires a `completion_kind` event when a service ends and
        complete() hands the token to `on_complete`. An untimed facility fires
        nothing; its owner frees the server with release().
        """
        if servers < 1:
            raise DefinitionError(f"facility {name!r} needs at least one server, got {servers}")
        if name in self.facilities:
            raise DefinitionError(f"facility {name!r} is already defined")
        facility = Facility(name, servers, on_complete, completion_kind, timed)
        facility.stats.last_queue_change = self.clock
        self.facilities[name] = facility
        return facility

    def request(self, facility: Facility, token: Token, priority: int, service_time: float) -> ServiceOutcome:
        self._check_request(facility, token, service_time)
        token.priority = priority
        token.service_time = service_time
        token.served = 0.0
        if facility.up and facility.has_free_server():
            self._start_service(facility, token, priority, service_time, self.clock)
            return ServiceOutcome.SERVED
        self._enqueue(facility, token, priority, service_time, preempted=False)
        return ServiceOutcome.ENQUEUED

    def preempt(self, facility: Facility, token: Token, priority: int, service_time: float) -> ServiceOutcome:
        self._check_request(facility, token, service_time)
        if not facility.up or facility.has_free_server():
            return self.request(facility, token, priority, service_time)

        victim_slot = None
        victim_key = None
        for slot, server in facility.busy_slots():
            if server.priority >= priority:
                continue
            key = (server.priority, server.started_at, slot)
            if victim_key is None or key < victim_key:
                victim_slot, victim_key = slot, key
        if victim_slot is None:
            return self.request(facility, token, priority, service_time)

        server = facility.servers[victim_slot]
        victim = server.token
        victim_priority = server.priority
        remaining = server.release_at - self.clock
        if server.release_event_id is not None:
            self._chain.remove(server.release_event_id)
        self._end_service(facility, victim_slot)
        self._enqueue(facility, victim, victim_priority, remaining, preempted=True)
        facility.stats.preemptions += 1

        token.priority = priority
        token.service_time = service_time
        token.served = 0.0
        self._start_service(facility, token, priority, service_time, self.clock)
        return ServiceOutcome.SERVED

    def release(self, facility: Facility, slot: int) -> Token | None:
        """
        Free a busy server and pull the head of the queue into service.

        Returns the token that entered service, if any.
        """
        self._check_owned(facility)
        if slot >= len(facility.servers) or not facility.servers[slot].busy:
            raise FacilityError(f"release of free server {slot} on {facility.name}")
        server = facility.servers[slot]
        if server.release_event_id is not None:
            self._chain.remove(server.release_event_id)
        self._end_service(facility, slot)
        facility.stats.completions += 1
        return self._pull_queue(facility)

    def complete(self, event: Event) -> Token:
        """Handle a fired completion event and notify the facility's owner."""
        token: Token = event.token
        facility = token.facility
        if facility is None or token.slot is None:
            raise FacilityError(f"completion event {event.id} for {token!r} which is not in service")
        facility.servers[token.slot].release_event_id = None
        self.release(facility, token.slot)
        if facility.on_complete is not None:
            facility.on_complete(token)
        return token

    def abort_service(self, facility: Facility, token: Token) -> bool:
        """Stop a token's service without completing it."""
        self._check_owned(facility)
        if token.facility is not facility or token.slot is None:
            return False
        server = facility.servers[token.slot]
        if server.release_event_id is not None:
            self._chain.remove(server.release_event_id)
        self._end_service(facility, token.slot)
        self._pull_queue(facility)
        return True

    def withdraw_queue(self, facility: Facility) -> list[Token]:
        """Remove every waiting token from a facility's queue, in service order."""
        self._check_owned(facility)
        tokens = []
        for entry in facility.drain_queue(self.clock):
            entry.token.service_remaining = None
            tokens.append(entry.token)
        return tokens

    def set_facility_up(self, facility: Facility, up: bool) -> None:
        self._check_owned(facility)
        if facility.up == up:
            return
        facility.up = up
        if up:
            self._pull_queue(facility)

    def facility_stats(self, facility: Facility, now: float | None = None) -> FacilityStatsView:
        now = self.clock if now is None else now
        stats = facility.stats
        busy_time = stats.busy_time + sum(now - server.started_at for _, server in facility.busy_slots())
        queue_area = stats.queue_area + facility.queue_length * (now - stats.last_queue_change)
        return FacilityStatsView(
            name=facility.name,
            servers=facility.capacity,
            elapsed=now,
            completions=stats.completions,
            busy_time=busy_time,
            queue_exits=stats.queue_exits,
            cumulative_wait=stats.cumulative_wait,
            max_queue_len=stats.max_queue_len,
            preemptions=stats.preemptions,
            utilization=busy_time / (now * facility.capacity) if now > 0 else 0.0,
            mean_wait=stats.cumulative_wait / stats.queue_exits if stats.queue_exits else 0.0,
            mean_queue_length=queue_area / now if now > 0 else 0.0,
        )

    # Internals

    def _check_owned(self, facility: Facility) -> None:
        if self.facilities.get(facility.name) is not facility:
            raise FacilityError(f"facility {facility.name!r} is not defined in this kernel")

    def _check_request(self, facility: Facility, token: Token, service_time: float) -> None:
        self._check_owned(facility)
        if not math.isfinite(service_time) or service_time < 0:
            raise FacilityError(f"invalid service time {service_time!r} on {facility.name}")
        if token.facility is not None:
            raise FacilityError(f"{token!r} is already in service at {token.facility.name}")

    def _enqueue(self, facility: Facility, token: Token, priority: int, service_time: float, preempted: bool):
        token.service_remaining = service_time
        facility.push_queue(token, priority, self.clock, service_time, preempted)

    def _start_service(self, facility: Facility, token: Token, priority: int, duration: float, enqueued_at: float):
        slot = facility.take_free_slot()
        server = facility.servers[slot]
        server.busy = True
        server.token = token
        server.priority = priority
        server.started_at = self.clock
        server.release_at = self.clock + duration
        if facility.timed:
            server.release_event_id = self.schedule(facility.completion_kind, duration, token)
        facility.busy_count += 1
        token.facility = facility
        token.slot = slot
        token.service_remaining = None
        facility.stats.queue_exits += 1
        facility.stats.cumulative_wait += self.clock - enqueued_at

    def _end_service(self, facility: Facility, slot: int) -> None:
        server = facility.servers[slot]
        token = server.token
        elapsed = self.clock - server.started_at
        facility.stats.busy_time += elapsed
        token.served += elapsed
        token.facility = None
        token.slot = None
        server.busy = False
        server.token = None
        server.release_event_id = None
        facility.busy_count -= 1
        facility.give_back_slot(slot)

    def _pull_queue(self, facility: Facility) -> Token | None:
        started = None
        while facility.up and facility.queue and facility.has_free_server():
            entry = facility.pop_queue(self.clock)
            self._start_service(facility, entry.token, entry.priority, entry.service_time, entry.enqueue_time)
            started = entry.token
        return started
