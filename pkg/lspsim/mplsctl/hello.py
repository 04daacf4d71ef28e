from __future__ import annotations

from dataclasses import dataclass


@dataclass
class HelloAdjacency:
    local: int
    neighbor: int
    phase_offset: float = 0.0
    last_ack_at: float | None = None
    pending_since: float | None = None
    alive: bool = True
    # no detection until the first ACK has been seen
    armed: bool = False
    hellos_sent: int = 0
    acks_received: int = 0
    detections: int = 0

    def __repr__(self):
        state = "alive" if self.alive else "dead"
        return f"HelloAdjacency({self.local}->{self.neighbor}, {state})"

    @property
    def key(self) -> tuple[int, int]:
        return (self.local, self.neighbor)

    def on_hello_sent(self, now: float) -> None:
        self.hellos_sent += 1
        if self.pending_since is None:
            self.pending_since = now

    def on_ack(self, now: float) -> bool:
        """Record an ACK; True when it revives a dead adjacency."""
        self.acks_received += 1
        self.last_ack_at = now
        self.pending_since = None
        self.armed = True
        revived = not self.alive
        self.alive = True
        return revived

    def expired(self, now: float, ack_timeout: float) -> bool:
        return (
            self.alive
            and self.armed
            and self.pending_since is not None
            and now - self.last_ack_at > ack_timeout
        )
