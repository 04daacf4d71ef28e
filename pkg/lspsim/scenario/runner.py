"""
Builds a simulation from a scenario and runs its dispatch loop.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass

from lspsim.conf import settings
from lspsim.errors import DispatchError, SignalingError
from lspsim.kernel import Event, EventKind, Kernel
from lspsim.mplsctl import ControlPlane, DetectionRecord
from lspsim.netshell import HELLO_KINDS, DeliveryRecord, DropCause, NetShell

from .config import ScenarioConfig
from .report import FailureReport, FlowReport, RunReport, TraceRecorder, flow_statistics

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinkStateTimer:
    """One-shot timer that fails or restores a duplex link."""

    a: int
    b: int
    up: bool

    def describe(self) -> str:
        return f"{'restore' if self.up else 'fail'} {self.a}-{self.b}"


@dataclass
class SimulationResult:
    report: RunReport
    records: list[DeliveryRecord]
    trace: list[str] | None = None


class Simulation:
    def __init__(
        self,
        config: ScenarioConfig,
        *,
        trace: bool = False,
        medium_servers: int | None = None,
        hop_limit: int | None = None,
    ):
        self.config = config
        self.recorder = TraceRecorder(settings.TIME_DECIMALS) if trace else None
        self.kernel = Kernel(config.seed, trace=self.recorder)
        self.shell = NetShell(
            self.kernel,
            medium_servers=medium_servers or settings.MAX_MEDIUM_SERVERS,
            control_channel=config.control_channel,
            hop_limit=hop_limit or settings.HOP_LIMIT,
            data_priority=settings.DATA_PRIORITY,
            control_priority=settings.CONTROL_PRIORITY,
        )
        self.control = ControlPlane(self.kernel, self.shell, config.timers, first_label=settings.FIRST_LABEL)
        self.failures: dict[tuple[int, int], list[FailureReport]] = {}
        self.finished = False
        self._built = False
        self._errors_seen = 0
        self._dispatch = {
            EventKind.SOURCE_ARRIVAL: self._on_source_arrival,
            EventKind.LINK_TRANSMIT_REQUEST: self._on_transmit_request,
            EventKind.PROPAGATE: self.kernel.complete,
            EventKind.NODE_ARRIVAL: self._on_node_arrival,
            EventKind.CONTROL_ARRIVAL: self._on_control_arrival,
            EventKind.REFRESH_LSP_STATES: self._on_refresh,
            EventKind.GENERATE_HELLO: self._on_generate_hello,
            EventKind.TIMEOUT_TRIGGER: self._on_timeout_trigger,
            EventKind.START_GENERATOR: self._on_start_generator,
            EventKind.END_SIMULATION: self._on_end_simulation,
            EventKind.RELEASE: self.kernel.complete,
        }

    def __repr__(self):
        return f"Simulation(seed={self.config.seed}, clock={self.kernel.clock!r})"

    def build(self) -> None:
        config = self.config
        shell, control, kernel = self.shell, self.control, self.kernel
        for _ in range(config.nodes):
            shell.create_node()
        for link in config.links:
            shell.create_duplex_link(link.a, link.b, link.bandwidth, link.prop_delay)
        for route in config.routes:
            shell.add_static_route(route.node, route.dst, route.next_hop)
        for source in config.generators:
            generator = shell.create_generator(
                source.id,
                source.kind,
                source.node,
                source.dst,
                source.size,
                source.rate,
                on_mean=source.on_mean,
                off_mean=source.off_mean,
                pareto_shape=source.shape,
                pareto_scale=source.scale,
                start_time=source.start,
            )
            shell.start_generator(generator)
        for policer in config.policers:
            shell.add_policer(policer.target, policer.id, policer.rate, policer.bucket)

        control.create_adjacencies()
        for lsp in config.lsps:
            control.set_lsp(
                lsp.ingress,
                lsp.egress,
                lsp.route,
                lsp.bandwidth,
                lsp_id=lsp.id,
                optional=lsp.optional,
            )
        for backup in config.backups:
            control.set_backup_lsp(
                backup.protects,
                backup.merge_start,
                backup.merge_end,
                backup.route,
                lsp_id=backup.id,
            )

        kernel.schedule(EventKind.GENERATE_HELLO, 0.0)
        kernel.schedule(EventKind.TIMEOUT_TRIGGER, config.timers.sweep_interval)
        for failure in config.failures:
            kernel.schedule(EventKind.TIMEOUT_TRIGGER, failure.fail_at, LinkStateTimer(failure.a, failure.b, up=False))
            if failure.restore_at is not None:
                kernel.schedule(
                    EventKind.TIMEOUT_TRIGGER,
                    failure.restore_at,
                    LinkStateTimer(failure.a, failure.b, up=True),
                )
        kernel.schedule(EventKind.END_SIMULATION, config.sim_end)
        self._built = True
        logger.info(
            "Built scenario: %s nodes, %s links, %s generators, %s LSPs",
            config.nodes,
            len(config.links),
            len(config.generators),
            len(config.lsps) + len(config.backups),
            extra={"seed": config.seed},
        )

    def run(self) -> SimulationResult:
        started = time.perf_counter()
        self.run_until(math.inf)
        runtime = time.perf_counter() - started
        report = self.report(runtime)
        logger.info(
            "Simulation finished at %.3f s after %s events in %.2f s",
            self.kernel.clock,
            self.kernel.events_caused,
            runtime,
            extra={"seed": self.config.seed, "sim_time": self.kernel.clock},
        )
        return SimulationResult(
            report=report,
            records=self.records(),
            trace=self.recorder.lines if self.recorder is not None else None,
        )

    def run_until(self, until: float) -> None:
        """Dispatch every event firing at or before ``until``."""
        if not self._built:
            self.build()
            self._check_setup()
        kernel = self.kernel
        while not self.finished:
            fire_time = kernel.peek_time()
            if fire_time is None or fire_time > until:
                break
            self.dispatch(kernel.cause())

    def dispatch(self, event: Event) -> None:
        handler = self._dispatch.get(event.kind)
        if handler is None:
            raise DispatchError(f"no handler for event kind {event.kind!r}")
        handler(event)
        if len(self.control.setup_errors) != self._errors_seen:
            self._check_setup()

    def _check_setup(self) -> None:
        errors = self.control.setup_errors
        fatal = [error for error in errors[self._errors_seen :] if error.fatal]
        self._errors_seen = len(errors)
        if fatal:
            first = fatal[0]
            message = f"LSP {first.lsp_id} could not be established at node {first.node}: {first.reason}"
            raise SignalingError(message, report=self.report())

    # Event handlers

    def _on_source_arrival(self, event: Event) -> None:
        self.shell.next_emission(event.token)

    def _on_transmit_request(self, event: Event) -> None:
        self.shell.handle_transmit_request(event.token)

    def _on_node_arrival(self, event: Event) -> None:
        self.shell.node_arrival(event.token)

    def _on_control_arrival(self, event: Event) -> None:
        self.control.control_arrival(event.token)

    def _on_refresh(self, event: Event) -> None:
        if event.token is None:
            self.control.refresh_all_lsps()
        else:
            self.control.refresh_lsp(event.token)

    def _on_generate_hello(self, event: Event) -> None:
        self.control.generate_hellos()
        self.kernel.schedule(EventKind.GENERATE_HELLO, self.config.timers.hello_interval)

    def _on_timeout_trigger(self, event: Event) -> None:
        timer = event.token
        if timer is None:
            for detection in self.control.timeout_sweep():
                self._record_detection(detection)
            self.kernel.schedule(EventKind.TIMEOUT_TRIGGER, self.config.timers.sweep_interval)
        elif timer.up:
            self.shell.restore_link(timer.a, timer.b)
        else:
            dropped = self.shell.fail_link(timer.a, timer.b)
            failure = FailureReport(link=f"{timer.a}-{timer.b}", fail_at=self.kernel.clock, dropped_at_failure=dropped)
            for declared in self.config.failures:
                if (declared.a, declared.b) == (timer.a, timer.b) and declared.fail_at == failure.fail_at:
                    failure.restore_at = declared.restore_at
            self.failures.setdefault(_pair(timer.a, timer.b), []).append(failure)

    def _record_detection(self, detection: DetectionRecord) -> None:
        for failure in self.failures.get(_pair(detection.node, detection.neighbor), []):
            if failure.detected_at is None and (failure.restore_at is None or detection.time <= failure.restore_at):
                failure.detected_at = detection.time
                failure.detected_by = detection.node
            failure.spliced += detection.spliced
            failure.unprotected += detection.unprotected

    def _on_start_generator(self, event: Event) -> None:
        self.shell.handle_start_generator(event.token)

    def _on_end_simulation(self, event: Event) -> None:
        self.shell.stop_generators()
        self.finished = True

    # Results

    def records(self) -> list[DeliveryRecord]:
        records = []
        for _, metrics in sorted(self.shell.flows.items(), key=_flow_order):
            records.extend(metrics.records)
        return records

    def report(self, runtime: float = 0.0) -> RunReport:
        shell, control, kernel = self.shell, self.control, self.kernel
        records = self.records()
        stats = flow_statistics(records)
        flows = []
        for flow_id, metrics in sorted(shell.flows.items(), key=_flow_order):
            flow_stats = stats.get(flow_id, {})
            flows.append(
                FlowReport(
                    flow_id=flow_id,
                    sent=metrics.sent,
                    received=metrics.received,
                    dropped=metrics.dropped,
                    in_flight=shell.in_flight(flow_id),
                    mean_delay=flow_stats.get("mean_delay"),
                    max_delay=flow_stats.get("max_delay"),
                    mean_jitter=flow_stats.get("mean_jitter"),
                    max_jitter=flow_stats.get("max_jitter"),
                )
            )

        failures = [failure for _, group in sorted(self.failures.items()) for failure in group]
        failures.sort(key=lambda failure: failure.fail_at)
        for failure in failures:
            a, b = (int(node) for node in failure.link.split("-"))
            until = failure.detected_at if failure.detected_at is not None else kernel.clock
            failure.dropped_until_detection = failure.hellos_lost = 0
            for drop in shell.drop_log:
                if drop.link not in ((a, b), (b, a)) or not failure.fail_at <= drop.time <= until:
                    continue
                # HELLOs refused by the down interface are counted apart
                if drop.cause is DropCause.LINK_DOWN and drop.msg_kind in HELLO_KINDS:
                    failure.hellos_lost += 1
                else:
                    failure.dropped_until_detection += 1

        return RunReport(
            seed=self.config.seed,
            sim_end=self.config.sim_end,
            end_time=kernel.clock,
            events_dispatched=kernel.events_caused,
            flows=flows,
            link_drops=shell.link_drops(),
            drop_causes={cause.value: count for cause, count in shell.drop_causes.items()},
            control_messages={
                kind.value: count for kind, count in shell.sent_by_kind.items() if kind.value != "DATA"
            },
            lsp_states={lsp_id: lsp.state.value for lsp_id, lsp in sorted(control.lsps.items())},
            lsp_splices={
                lsp_id: lsp.spliced_onto for lsp_id, lsp in control.lsps.items() if lsp.spliced_onto is not None
            },
            failures=failures,
            detections=list(control.detections),
            setup_errors=[
                f"lsp {error.lsp_id} at node {error.node} t={error.time:.9f}: {error.reason}"
                for error in control.setup_errors
            ],
            stale_messages=control.stale_messages,
            label_misses=control.lib.misses,
            runtime=runtime,
        )


def _pair(a: int, b: int) -> tuple[int, int]:
    return (min(a, b), max(a, b))


def _flow_order(item) -> tuple:
    # data flows by id, then the control flow
    flow_id = item[0]
    return (1, 0, flow_id) if isinstance(flow_id, str) else (0, flow_id, "")


def run_simulation(config: ScenarioConfig, *, trace: bool = False) -> SimulationResult:
    return Simulation(config, trace=trace).run()

