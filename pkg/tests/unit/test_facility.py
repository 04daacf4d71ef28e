"""
Unit tests for facilities: service, queueing, preemption and statistics.
"""

import pytest

from lspsim.errors import DefinitionError, FacilityError
from lspsim.kernel import EventKind, Exponential, Kernel, ServiceOutcome, Uniform


def drain(kernel):
    """Fire events until the chain is empty, completing services."""
    while (event := kernel.cause()) is not None:
        if event.kind is EventKind.RELEASE:
            kernel.complete(event)


@pytest.mark.unit
class TestFacilityDefinition:
    """Test cases for defining facilities."""

    def test_define_facility(self, kernel):
        """Test a facility is registered by name."""
        facility = kernel.define_facility("router", 2)
        assert kernel.facilities["router"] is facility
        assert facility.capacity == 2
        assert facility.up

    def test_zero_servers_rejected(self, kernel):
        """Test a facility needs at least one server."""
        with pytest.raises(DefinitionError):
            kernel.define_facility("router", 0)

    def test_duplicate_name_rejected(self, kernel):
        """Test facility names are unique."""
        kernel.define_facility("router", 1)
        with pytest.raises(DefinitionError):
            kernel.define_facility("router", 1)

    def test_large_facility_materializes_used_servers_only(self, kernel):
        """Test servers are created on demand."""
        facility = kernel.define_facility("medium", 65536)
        for _ in range(3):
            kernel.request(facility, kernel.new_token(), 0, 1.0)
        assert len(facility.servers) == 3

    def test_foreign_facility_rejected(self, kernel):
        """Test a facility from another kernel cannot be used."""
        other = Kernel(seed=1).define_facility("router", 1)
        with pytest.raises(FacilityError):
            kernel.request(other, kernel.new_token(), 0, 1.0)


@pytest.mark.unit
class TestRequestRelease:
    """Test cases for request and release."""

    def test_request_free_server(self, kernel):
        """Test a request on an idle facility is served at once."""
        facility = kernel.define_facility("router", 1)
        token = kernel.new_token()

        assert kernel.request(facility, token, 0, 2.0) is ServiceOutcome.SERVED
        assert facility.is_busy
        assert token.facility is facility
        assert kernel.peek_time() == 2.0

    def test_request_busy_server_queues(self, kernel):
        """Test a request on a busy facility is enqueued."""
        facility = kernel.define_facility("router", 1)
        kernel.request(facility, kernel.new_token(), 0, 2.0)

        assert kernel.request(facility, kernel.new_token(), 0, 1.0) is ServiceOutcome.ENQUEUED
        assert facility.queue_length == 1

    def test_release_starts_queue_head(self, kernel):
        """Test releasing a server pulls the next token in."""
        finished = []
        facility = kernel.define_facility("router", 1, on_complete=lambda token: finished.append((kernel.clock, token.id)))
        first, second = kernel.new_token(), kernel.new_token()
        kernel.request(facility, first, 0, 2.0)
        kernel.request(facility, second, 0, 1.0)
        drain(kernel)

        assert finished == [(2.0, first.id), (3.0, second.id)]
        assert facility.stats.completions == 2

    def test_release_free_server_fails(self, kernel):
        """Test releasing an idle server is a kernel error."""
        facility = kernel.define_facility("router", 1)
        with pytest.raises(FacilityError):
            kernel.release(facility, 0)

    def test_token_cannot_be_served_twice(self, kernel):
        """Test a token already in service cannot request again."""
        facility = kernel.define_facility("router", 2)
        token = kernel.new_token()
        kernel.request(facility, token, 0, 1.0)
        with pytest.raises(FacilityError):
            kernel.request(facility, token, 0, 1.0)

    def test_negative_service_time_rejected(self, kernel):
        """Test service times must be non-negative."""
        facility = kernel.define_facility("router", 1)
        with pytest.raises(FacilityError):
            kernel.request(facility, kernel.new_token(), 0, -1.0)

    def test_priority_order_in_queue(self, kernel):
        """Test higher priority tokens leave the queue first, FIFO among equals."""
        order = []
        facility = kernel.define_facility("router", 1, on_complete=lambda token: order.append(token.payload))
        kernel.request(facility, kernel.new_token(payload="busy"), 0, 1.0)
        for payload, priority in [("low-1", 0), ("high-1", 5), ("low-2", 0), ("high-2", 5)]:
            kernel.request(facility, kernel.new_token(priority, payload), priority, 1.0)
        drain(kernel)

        assert order == ["busy", "high-1", "high-2", "low-1", "low-2"]

    def test_facility_down_holds_queue(self, kernel):
        """Test a down facility queues requests and serves them once up."""
        finished = []
        facility = kernel.define_facility("router", 1, on_complete=lambda token: finished.append(kernel.clock))
        kernel.set_facility_up(facility, False)

        assert kernel.request(facility, kernel.new_token(), 0, 1.0) is ServiceOutcome.ENQUEUED
        kernel.schedule(EventKind.TIMEOUT_TRIGGER, 5.0)
        kernel.cause()
        kernel.set_facility_up(facility, True)
        drain(kernel)

        assert finished == [6.0]

    def test_abort_service(self, kernel):
        """Test an aborted token leaves without a completion."""
        finished = []
        facility = kernel.define_facility("router", 1, on_complete=finished.append)
        token = kernel.new_token()
        kernel.request(facility, token, 0, 10.0)

        assert kernel.abort_service(facility, token) is True
        assert not facility.is_busy
        assert kernel.pending() == 0
        assert kernel.abort_service(facility, token) is False
        assert finished == []
        assert facility.stats.completions == 0

    def test_custom_completion_kind(self, kernel):
        """Test a facility can end its services with another event kind."""
        finished = []
        facility = kernel.define_facility("link", 1, on_complete=finished.append, completion_kind=EventKind.PROPAGATE)
        token = kernel.new_token()
        kernel.request(facility, token, 0, 0.5)
        event = kernel.cause()

        assert event.kind is EventKind.PROPAGATE
        assert kernel.complete(event) is token
        assert finished == [token]
        assert not facility.is_busy

    def test_untimed_facility(self, kernel):
        """Test an untimed facility holds a server until it is released."""
        facility = kernel.define_facility("medium", 4, timed=False)
        first, second = kernel.new_token(), kernel.new_token()
        kernel.request(facility, first, 0, 0.010)
        kernel.request(facility, second, 0, 0.010)

        assert kernel.pending() == 0
        assert facility.busy_count == 2
        kernel.release(facility, first.slot)
        assert kernel.abort_service(facility, second) is True
        assert facility.busy_count == 0
        assert facility.stats.completions == 1

    def test_withdraw_queue(self, kernel):
        """Test waiting tokens are withdrawn in service order and the server keeps its token."""
        facility = kernel.define_facility("router", 1)
        busy = kernel.new_token(payload="busy")
        kernel.request(facility, busy, 0, 1.0)
        for payload, priority in [("low", 0), ("high", 5), ("low-2", 0)]:
            kernel.request(facility, kernel.new_token(priority, payload), priority, 1.0)

        withdrawn = kernel.withdraw_queue(facility)

        assert [token.payload for token in withdrawn] == ["high", "low", "low-2"]
        assert facility.queue_length == 0
        assert busy.facility is facility
        assert all(token.facility is None for token in withdrawn)
        other = kernel.define_facility("other", 1)
        assert kernel.request(other, withdrawn[0], 5, 1.0) is ServiceOutcome.SERVED


@pytest.mark.unit
class TestPreemption:
    """Test cases for preemptive requests."""

    def test_preempt_lower_priority(self, kernel):
        """Test a higher priority token displaces a lower one, which resumes later."""
        finished = []
        facility = kernel.define_facility("router", 1, on_complete=lambda token: finished.append((kernel.clock, token.payload)))
        low = kernel.new_token(0, "low")
        kernel.request(facility, low, 0, 4.0)
        kernel.schedule(EventKind.TIMEOUT_TRIGGER, 1.0)
        kernel.cause()

        high = kernel.new_token(3, "high")
        assert kernel.preempt(facility, high, 3, 2.0) is ServiceOutcome.SERVED
        assert facility.stats.preemptions == 1
        drain(kernel)

        assert finished == [(3.0, "high"), (6.0, "low")]
        assert low.served == pytest.approx(4.0, abs=1e-12)

    def test_preempt_equal_priority_queues(self, kernel):
        """Test preemption never displaces an equal priority token."""
        facility = kernel.define_facility("router", 1)
        kernel.request(facility, kernel.new_token(2), 2, 4.0)

        assert kernel.preempt(facility, kernel.new_token(2), 2, 1.0) is ServiceOutcome.ENQUEUED
        assert facility.stats.preemptions == 0

    def test_preempt_picks_lowest_priority_victim(self, kernel):
        """Test the lowest priority server is the one preempted."""
        facility = kernel.define_facility("router", 2)
        mid = kernel.new_token(1, "mid")
        low = kernel.new_token(0, "low")
        kernel.request(facility, mid, 1, 5.0)
        kernel.request(facility, low, 0, 5.0)

        kernel.preempt(facility, kernel.new_token(4, "high"), 4, 1.0)

        assert mid.facility is facility
        assert low.facility is None
        assert low.service_remaining == pytest.approx(5.0)

    def test_preempted_tokens_resume_by_priority(self, kernel):
        """Test displaced tokens resume highest priority first."""
        order = []
        facility = kernel.define_facility("router", 1, on_complete=lambda token: order.append(token.payload))
        kernel.request(facility, kernel.new_token(0, "first"), 0, 3.0)
        kernel.preempt(facility, kernel.new_token(1, "second"), 1, 3.0)
        kernel.preempt(facility, kernel.new_token(2, "third"), 2, 3.0)
        drain(kernel)

        assert order == ["third", "second", "first"]

    def test_equal_priority_preempted_tokens_resume_fifo(self, kernel):
        """Test equal priority preempted tokens re-enter in preemption order."""
        order = []
        facility = kernel.define_facility("router", 2, on_complete=lambda token: order.append(token.payload))
        kernel.request(facility, kernel.new_token(0, "a"), 0, 3.0)
        kernel.request(facility, kernel.new_token(0, "b"), 0, 3.0)
        kernel.preempt(facility, kernel.new_token(5, "h1"), 5, 1.0)
        kernel.preempt(facility, kernel.new_token(5, "h2"), 5, 1.0)
        drain(kernel)

        assert order == ["h1", "h2", "a", "b"]

    def test_preemption_conserves_service(self):
        """Test every token's service slices add up to its requested time."""
        kernel = Kernel(seed=11)
        finished = []
        facility = kernel.define_facility("router", 2, on_complete=finished.append)
        arrivals = Exponential(kernel.stream(1), 1.0)
        services = Exponential(kernel.stream(2), 1.5)
        priorities = Uniform(kernel.stream(3), 0.0, 4.0)
        total = 10_000
        created = 0
        kernel.schedule(EventKind.SOURCE_ARRIVAL, 0.0)
        while (event := kernel.cause()) is not None:
            if event.kind is EventKind.RELEASE:
                kernel.complete(event)
                continue
            priority = int(priorities.sample())
            kernel.preempt(facility, kernel.new_token(priority), priority, services.sample())
            created += 1
            if created < total:
                kernel.schedule(EventKind.SOURCE_ARRIVAL, arrivals.sample())

        assert len(finished) == total
        assert facility.stats.preemptions > 0
        for token in finished:
            assert token.served == pytest.approx(token.service_time, abs=1e-9)


@pytest.mark.unit
class TestFacilityStats:
    """Test cases for facility statistics."""

    def test_utilization_and_wait(self, kernel):
        """Test busy time, waits and queue length over a known schedule."""
        facility = kernel.define_facility("router", 1)
        kernel.request(facility, kernel.new_token(), 0, 2.0)
        kernel.request(facility, kernel.new_token(), 0, 2.0)
        drain(kernel)
        kernel.schedule(EventKind.END_SIMULATION, 1.0)
        kernel.cause()

        stats = kernel.facility_stats(facility)
        assert stats.elapsed == 5.0
        assert stats.busy_time == pytest.approx(4.0)
        assert stats.utilization == pytest.approx(0.8)
        assert stats.queue_exits == 2
        assert stats.mean_wait == pytest.approx(1.0)
        assert stats.max_queue_len == 1
        assert stats.mean_queue_length == pytest.approx(2.0 / 5.0)

    def test_stats_include_service_in_progress(self, kernel):
        """Test busy time counts a service that has not finished yet."""
        facility = kernel.define_facility("router", 1)
        kernel.request(facility, kernel.new_token(), 0, 10.0)
        stats = kernel.facility_stats(facility, now=4.0)
        assert stats.busy_time == pytest.approx(4.0)
        assert stats.utilization == pytest.approx(1.0)
