"""
Nodes and simplex links.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from lspsim.kernel import Facility, Token

    from .generators import TrafficGenerator


@dataclass(slots=True)
class NodeCounters:
    received: int = 0
    originated: int = 0
    delivered: int = 0
    forwarded: int = 0
    dropped: int = 0

    def balanced(self, in_transit: int = 0) -> bool:
        return self.received + self.originated == self.delivered + self.forwarded + self.dropped + in_transit


@dataclass(eq=False)
class Node:
    id: int
    # destination node -> next-hop node
    static_routes: dict[int, int] = field(default_factory=dict)
    # neighbor node -> outgoing simplex link
    links: dict[int, Link] = field(default_factory=dict)
    attached_generators: list[TrafficGenerator] = field(default_factory=list)
    counters: NodeCounters = field(default_factory=NodeCounters)

    def __repr__(self):
        return f"Node({self.id})"

    def neighbors(self) -> list[int]:
        return sorted(self.links)


@dataclass(eq=False)
class Link:
    id: int
    from_node: int
    to_node: int
    bandwidth: float
    prop_delay: float
    tx_facility: Facility
    medium_facility: Facility
    # separate transmitter for control messages on a dedicated control channel
    control_facility: Facility | None = None
    up: bool = True
    reserved_bw: float = 0.0
    drop_count: int = 0
    # packet id -> token currently propagating in the medium
    in_medium: dict[int, Token] = field(default_factory=dict)

    def __repr__(self):
        return f"Link({self.name}, up={self.up})"

    @property
    def key(self) -> tuple[int, int]:
        return (self.from_node, self.to_node)

    @property
    def name(self) -> str:
        return f"{self.from_node}-{self.to_node}"

    def transmission_time(self, size: int) -> float:
        return size * 8 / self.bandwidth

    def transmitters(self) -> list[Facility]:
        if self.control_facility is None:
            return [self.tx_facility]
        return [self.tx_facility, self.control_facility]

    def facilities(self) -> list[Facility]:
        return [*self.transmitters(), self.medium_facility]
