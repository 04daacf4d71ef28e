"""
Per-flow delay, jitter and loss measurement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .packet import Packet


@dataclass(frozen=True, slots=True)
class DeliveryRecord:
    flow_id: int | str
    packet_id: int
    created_at: float
    arrived_at: float
    delay: float
    jitter: float


@dataclass
class FlowMetrics:
    flow_id: int | str
    records: list[DeliveryRecord] = field(default_factory=list)
    sent: int = 0
    received: int = 0
    dropped: int = 0
    last_delay: float | None = None
    keep_records: bool = True

    def delays(self) -> np.ndarray:
        return np.fromiter((record.delay for record in self.records), dtype=float, count=len(self.records))

    def jitters(self) -> np.ndarray:
        return np.fromiter((record.jitter for record in self.records), dtype=float, count=len(self.records))


def record_delivery(metrics: FlowMetrics, packet: Packet, now: float) -> DeliveryRecord | None:
    """
    Account for a packet delivered at its destination.

    Jitter is the absolute difference from the previous packet's delay; the
    first packet of a flow has zero jitter.
    """
    metrics.received += 1
    if not metrics.keep_records:
        return None
    delay = now - packet.created_at
    jitter = 0.0 if metrics.last_delay is None else abs(delay - metrics.last_delay)
    metrics.last_delay = delay
    record = DeliveryRecord(
        flow_id=metrics.flow_id,
        packet_id=packet.id,
        created_at=packet.created_at,
        arrived_at=now,
        delay=delay,
        jitter=jitter,
    )
    metrics.records.append(record)
    return record
