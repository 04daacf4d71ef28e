"""
Token bucket policer.
"""

from __future__ import annotations

from enum import Enum
from typing import TYPE_CHECKING

from lspsim.errors import ConfigError

if TYPE_CHECKING:
    from .packet import Packet


class Verdict(Enum):
    CONFORM = "conform"
    DROP = "drop"


class Policer:
    """Admits a packet only when the bucket holds at least its size in bytes."""

    def __init__(self, rate: float, bucket_size: float, now: float = 0.0):
        if rate <= 0:
            raise ConfigError(f"policer rate must be positive, got {rate}")
        if bucket_size <= 0:
            raise ConfigError(f"policer bucket must be positive, got {bucket_size}")
        self.rate = rate
        self.bucket_size = bucket_size
        self.tokens = float(bucket_size)
        self.last_update = now
        self.conformed = 0
        self.dropped = 0
        self.admitted_bytes = 0

    def __repr__(self):
        return f"Policer(rate={self.rate}, bucket={self.bucket_size}, tokens={self.tokens:.1f})"

    def refill(self, now: float) -> None:
        elapsed = now - self.last_update
        if elapsed > 0:
            self.tokens = min(self.bucket_size, self.tokens + self.rate * elapsed / 8)
        self.last_update = max(self.last_update, now)

    def police(self, packet: Packet, now: float) -> Verdict:
        return self.police_size(packet.size, now)

    def police_size(self, size: int, now: float) -> Verdict:
        self.refill(now)
        if self.tokens >= size:
            self.tokens -= size
            self.conformed += 1
            self.admitted_bytes += size
            return Verdict.CONFORM
        self.dropped += 1
        return Verdict.DROP
