"""
Run reports and result files.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

import pandas as pd

from lspsim.errors import OutputError
from lspsim.kernel import Event
from lspsim.mplsctl import DetectionRecord
from lspsim.netshell import DeliveryRecord

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["flow_id", "packet_id", "created_at", "arrived_at", "delay", "jitter"]
DEFAULT_DECIMALS = 9


@dataclass(frozen=True)
class FlowReport:
    flow_id: int | str
    sent: int
    received: int
    dropped: int
    in_flight: int
    mean_delay: float | None = None
    max_delay: float | None = None
    mean_jitter: float | None = None
    max_jitter: float | None = None


@dataclass
class FailureReport:
    link: str
    fail_at: float
    restore_at: float | None = None
    dropped_at_failure: int = 0
    detected_at: float | None = None
    detected_by: int | None = None
    dropped_until_detection: int = 0
    hellos_lost: int = 0
    spliced: int = 0
    unprotected: int = 0


@dataclass
class RunReport:
    seed: int
    sim_end: float
    end_time: float
    events_dispatched: int
    flows: list[FlowReport] = field(default_factory=list)
    link_drops: dict[str, int] = field(default_factory=dict)
    drop_causes: dict[str, int] = field(default_factory=dict)
    control_messages: dict[str, int] = field(default_factory=dict)
    lsp_states: dict[int, str] = field(default_factory=dict)
    lsp_splices: dict[int, int] = field(default_factory=dict)
    failures: list[FailureReport] = field(default_factory=list)
    detections: list[DetectionRecord] = field(default_factory=list)
    setup_errors: list[str] = field(default_factory=list)
    stale_messages: int = 0
    label_misses: int = 0
    runtime: float = 0.0

    def flow(self, flow_id: int | str) -> FlowReport | None:
        return next((flow for flow in self.flows if flow.flow_id == flow_id), None)

    def summary_lines(self, decimals: int = DEFAULT_DECIMALS) -> list[str]:
        """
        ``key=value`` lines in a fixed order.

        The wall-clock runtime is left out so the summary of a run is
        reproducible byte for byte.
        """

        def fmt(value) -> str:
            if value is None:
                return "-"
            if isinstance(value, float):
                return f"{value:.{decimals}f}"
            return str(value)

        lines = [
            f"seed={self.seed}",
            f"sim_end={fmt(self.sim_end)}",
            f"end_time={fmt(self.end_time)}",
            f"events_dispatched={self.events_dispatched}",
        ]
        for flow in self.flows:
            for key, value in asdict(flow).items():
                if key != "flow_id":
                    lines.append(f"flow.{flow.flow_id}.{key}={fmt(value)}")
        lines += [f"drops.{cause}={count}" for cause, count in sorted(self.drop_causes.items())]
        lines += [f"link.{name}.drops={count}" for name, count in self.link_drops.items()]
        lines += [f"control.{kind}={count}" for kind, count in sorted(self.control_messages.items())]
        for lsp_id, state in sorted(self.lsp_states.items()):
            lines.append(f"lsp.{lsp_id}.state={state}")
            if lsp_id in self.lsp_splices:
                lines.append(f"lsp.{lsp_id}.spliced_onto={self.lsp_splices[lsp_id]}")
        for index, failure in enumerate(self.failures, start=1):
            lines += [f"failure.{index}.{key}={fmt(value)}" for key, value in asdict(failure).items()]
        for index, detection in enumerate(self.detections, start=1):
            lines += [f"detection.{index}.{key}={fmt(value)}" for key, value in asdict(detection).items()]
        lines += [f"setup_error.{index}={error}" for index, error in enumerate(self.setup_errors, start=1)]
        lines += [f"stale_messages={self.stale_messages}", f"label_misses={self.label_misses}"]
        return lines

    def as_row(self, flow_id: int | str | None = None) -> dict:
        """One flat row for sweep tables; totals over data flows unless a flow is named."""
        flows = [f for f in self.flows if f.flow_id != "control" and (flow_id is None or f.flow_id == flow_id)]
        first_failure = self.failures[0] if self.failures else None
        return {
            "seed": self.seed,
            "sent": sum(f.sent for f in flows),
            "received": sum(f.received for f in flows),
            "dropped": sum(f.dropped for f in flows),
            "dropped_at_failure": first_failure.dropped_at_failure if first_failure else 0,
            "dropped_until_detection": first_failure.dropped_until_detection if first_failure else 0,
            "hellos_lost": first_failure.hellos_lost if first_failure else 0,
            "detected_at": first_failure.detected_at if first_failure else None,
            "spliced": sum(d.spliced for d in self.detections),
            "runtime": self.runtime,
        }


def records_frame(records: list[DeliveryRecord]) -> pd.DataFrame:
    if not records:
        return pd.DataFrame({column: pd.Series(dtype=float) for column in CSV_COLUMNS})
    return pd.DataFrame([asdict(record) for record in records], columns=CSV_COLUMNS)


def flow_statistics(records: list[DeliveryRecord]) -> dict[int | str, dict[str, float]]:
    """Mean and max delay and jitter per flow."""
    frame = records_frame(records)
    if frame.empty:
        return {}
    grouped = frame.groupby("flow_id", sort=True).agg(
        mean_delay=("delay", "mean"),
        max_delay=("delay", "max"),
        mean_jitter=("jitter", "mean"),
        max_jitter=("jitter", "max"),
    )
    return {flow_id: {key: float(value) for key, value in row.items()} for flow_id, row in grouped.iterrows()}


def _open_for_write(path: Path):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        return open(path, "w", encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OutputError(path, exc.strerror or str(exc)) from exc


def emit_packets_csv(
    records: list[DeliveryRecord],
    path,
    flows=None,
    decimals: int = DEFAULT_DECIMALS,
) -> int:
    """Write per-packet records as CSV; returns the number of rows."""
    path = Path(path)
    frame = records_frame(records)
    if flows is not None:
        frame = frame[frame["flow_id"].isin(list(flows))]
    with _open_for_write(path) as handle:
        frame.to_csv(handle, index=False, float_format=f"%.{decimals}f", lineterminator="\n")
    logger.info("Wrote %s packet records to %s", len(frame), path)
    return len(frame)


def emit_summary(report: RunReport, path, decimals: int = DEFAULT_DECIMALS) -> None:
    path = Path(path)
    with _open_for_write(path) as handle:
        handle.write("\n".join(report.summary_lines(decimals)) + "\n")
    logger.info("Wrote summary to %s", path)


def emit_trace(lines: list[str], path) -> None:
    path = Path(path)
    with _open_for_write(path) as handle:
        for line in lines:
            handle.write(line + "\n")
    logger.info("Wrote %s trace lines to %s", len(lines), path)


def describe_token(token) -> str:
    if token is None:
        return "-"
    subject = getattr(token, "payload", None) or token
    describe = getattr(subject, "describe", None)
    return describe() if describe is not None else type(subject).__name__


class TraceRecorder:
    """Kernel trace hook collecting one line per caused event."""

    def __init__(self, decimals: int = DEFAULT_DECIMALS):
        self.decimals = decimals
        self.lines: list[str] = []

    def __call__(self, event: Event) -> None:
        self.lines.append(
            f"{event.fire_time:.{self.decimals}f} {event.id} {event.kind.name} {describe_token(event.token)}"
        )
