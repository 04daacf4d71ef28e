"""
The network shell: topology, packet forwarding, generators and failures.

Each handler here runs inside one kernel event. Links are a transmitter
facility with one server and a priority queue chained to a medium facility
with (practically) unbounded servers. A transmitter completes with a
PROPAGATE event; the medium is untimed and is released when the packet
arrives at the far end.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Protocol

from lspsim.errors import ConfigError, FacilityError
from lspsim.kernel import EventKind, Facility, Kernel, ServiceOutcome, Token

from .generators import GeneratorKind, GeneratorState, TrafficGenerator, generator_stream_id
from .metrics import FlowMetrics, record_delivery
from .packet import CONTROL_FLOW, MsgKind, Packet
from .policer import Policer, Verdict
from .topology import Link, Node

logger = logging.getLogger(__name__)

SHARED_CHANNEL = "shared"
DEDICATED_CHANNEL = "dedicated"


class DropCause(Enum):
    NO_ROUTE = "no-route"
    LINK_DOWN = "link-down"
    POLICER = "policer"
    LINK_FAILURE = "link-failure"
    TTL = "ttl"
    STALE = "stale"


@dataclass(frozen=True, slots=True)
class DropRecord:
    time: float
    packet_id: int
    flow_id: int | str
    msg_kind: MsgKind
    cause: DropCause
    node: int | None
    link: tuple[int, int] | None


@dataclass(frozen=True, slots=True)
class ForwardingDecision:
    """Outcome of a label-table lookup at one node."""

    next_node: int | None = None
    out_label: int | None = None
    pop: bool = False
    lsp_id: int | None = None
    pushed: bool = False


class ControlPlaneHooks(Protocol):
    def process_control_message(self, packet: Packet, node_id: int) -> None: ...

    def label_forward(self, packet: Packet, node_id: int) -> ForwardingDecision | None: ...


class NetShell:
    def __init__(
        self,
        kernel: Kernel,
        *,
        medium_servers: int,
        control_channel: str = SHARED_CHANNEL,
        hop_limit: int = 64,
        data_priority: int = 0,
        control_priority: int = 1,
    ):
        if control_channel not in (SHARED_CHANNEL, DEDICATED_CHANNEL):
            raise ConfigError(f"unknown control channel {control_channel!r}")
        self.kernel = kernel
        self.medium_servers = medium_servers
        self.control_channel = control_channel
        self.hop_limit = hop_limit
        self.data_priority = data_priority
        self.control_priority = control_priority

        self.nodes: dict[int, Node] = {}
        self.links: dict[tuple[int, int], Link] = {}
        self.generators: dict[int, TrafficGenerator] = {}
        self.policers: dict[tuple[str, int], Policer] = {}
        self.flows: dict[int | str, FlowMetrics] = {}
        self.live: dict[int, Packet] = {}
        self.drop_causes: Counter[DropCause] = Counter()
        self.drop_log: list[DropRecord] = []
        self.sent_by_kind: Counter[MsgKind] = Counter()
        self.control: ControlPlaneHooks | None = None
        self._last_packet_id = 0
        self._last_msg_id = 0

        self.flow(CONTROL_FLOW)

    def __repr__(self):
        return f"NetShell(nodes={len(self.nodes)}, links={len(self.links)})"

    @property
    def now(self) -> float:
        return self.kernel.clock

    def attach_control(self, control: ControlPlaneHooks) -> None:
        self.control = control

    # Topology

    def create_node(self) -> int:
        node_id = len(self.nodes) + 1
        self.nodes[node_id] = Node(node_id)
        return node_id

    def node(self, node_id: int) -> Node:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise ConfigError(f"unknown node {node_id}") from None

    def link(self, a: int, b: int) -> Link | None:
        return self.links.get((a, b))

    def create_duplex_link(self, a: int, b: int, bandwidth: float, prop_delay: float) -> tuple[Link, Link]:
        """Two independent simplex links, a->b and b->a."""
        self.node(a)
        self.node(b)
        if a == b:
            raise ConfigError(f"link endpoints must differ, got {a}-{b}")
        if not bandwidth > 0:
            raise ConfigError(f"link {a}-{b}: bandwidth must be positive, got {bandwidth}")
        if not prop_delay >= 0:
            raise ConfigError(f"link {a}-{b}: propagation delay must be non-negative, got {prop_delay}")
        if (a, b) in self.links or (b, a) in self.links:
            raise ConfigError(f"duplicate link {a}-{b}")
        return self._create_simplex(a, b, bandwidth, prop_delay), self._create_simplex(b, a, bandwidth, prop_delay)

    def _create_simplex(self, a: int, b: int, bandwidth: float, prop_delay: float) -> Link:
        kernel = self.kernel
        control_facility = None
        if self.control_channel == DEDICATED_CHANNEL:
            control_facility = self._define_transmitter(f"ctl-{a}-{b}")
        link = Link(
            id=len(self.links) + 1,
            from_node=a,
            to_node=b,
            bandwidth=bandwidth,
            prop_delay=prop_delay,
            tx_facility=self._define_transmitter(f"link-{a}-{b}"),
            medium_facility=kernel.define_facility(f"medium-{a}-{b}", self.medium_servers, timed=False),
            control_facility=control_facility,
        )
        self.links[link.key] = link
        self.nodes[a].links[b] = link
        return link

    def _define_transmitter(self, name: str) -> Facility:
        return self.kernel.define_facility(name, 1, self.propagate, completion_kind=EventKind.PROPAGATE)

    def add_static_route(self, node_id: int, dst: int, next_hop: int) -> None:
        node = self.node(node_id)
        self.node(dst)
        if next_hop not in node.links:
            raise ConfigError(f"route at node {node_id} to {dst}: {next_hop} is not a neighbor")
        node.static_routes[dst] = next_hop

    # Generators and policers

    def create_generator(
        self,
        generator_id: int,
        kind: GeneratorKind,
        node: int,
        dst_node: int,
        packet_size: int,
        rate: float,
        **options,
    ) -> TrafficGenerator:
        if generator_id in self.generators:
            raise ConfigError(f"duplicate generator {generator_id}")
        self.node(node)
        self.node(dst_node)
        streams = {offset: self.kernel.stream(generator_stream_id(generator_id, offset)) for offset in range(3)}
        generator = TrafficGenerator(generator_id, kind, node, dst_node, packet_size, rate, streams, **options)
        self.generators[generator_id] = generator
        self.nodes[node].attached_generators.append(generator)
        self.flow(generator_id)
        return generator

    def add_policer(self, target: str, target_id: int, rate: float, bucket_size: float) -> Policer:
        policer = Policer(rate, bucket_size, now=self.now)
        self.policers[(target, target_id)] = policer
        return policer

    def start_generator(self, generator: TrafficGenerator, at: float | None = None) -> int:
        at = generator.start_time if at is None else at
        return self.kernel.schedule(EventKind.START_GENERATOR, at - self.now, generator)

    def handle_start_generator(self, generator: TrafficGenerator) -> None:
        delay = generator.start(self.now)
        self.kernel.schedule(EventKind.SOURCE_ARRIVAL, delay, generator)
        logger.info(
            "Generator %s started at node %s",
            generator.id,
            generator.node,
            extra={"generator": generator.id, "sim_time": self.now},
        )

    def next_emission(self, generator: TrafficGenerator) -> Packet | None:
        if generator.state is GeneratorState.STOPPED:
            return None
        generator.resume()
        packet = self.new_packet(
            generator.packet_size,
            generator.node,
            generator.dst_node,
            flow_id=generator.id,
            priority=self.data_priority,
        )
        if self._police(("generator", generator.id), packet, generator.node):
            self.forward(packet)
        delay = generator.emit(self.now)
        if delay is not None:
            self.kernel.schedule(EventKind.SOURCE_ARRIVAL, delay, generator)
        return packet

    def stop_generators(self) -> None:
        for generator in self.generators.values():
            generator.stop()

    def _police(self, key: tuple[str, int], packet: Packet, node_id: int) -> bool:
        policer = self.policers.get(key)
        if policer is None or policer.police(packet, self.now) is Verdict.CONFORM:
            return True
        self.drop(packet, DropCause.POLICER, node_id=node_id)
        return False

    # Packets

    def flow(self, flow_id: int | str) -> FlowMetrics:
        metrics = self.flows.get(flow_id)
        if metrics is None:
            metrics = self.flows[flow_id] = FlowMetrics(flow_id, keep_records=flow_id != CONTROL_FLOW)
        return metrics

    def new_packet(
        self,
        size: int,
        src_node: int,
        dst_node: int,
        *,
        msg_kind: MsgKind = MsgKind.DATA,
        flow_id: int | str = CONTROL_FLOW,
        priority: int | None = None,
        explicit_route: tuple[int, ...] | None = None,
        lsp_id: int | None = None,
        mapped_label: int | None = None,
        reason: str | None = None,
        created_at: float | None = None,
    ) -> Packet:
        if size <= 0:
            raise ConfigError(f"packet size must be positive, got {size}")
        if explicit_route is not None and (explicit_route[0] != src_node or explicit_route[-1] != dst_node):
            raise ConfigError(f"explicit route {explicit_route} does not run {src_node}->{dst_node}")
        if priority is None:
            priority = self.data_priority if msg_kind is MsgKind.DATA else self.control_priority
        self._last_packet_id += 1
        msg_id = None
        if msg_kind is not MsgKind.DATA:
            self._last_msg_id += 1
            msg_id = self._last_msg_id
        packet = Packet(
            id=self._last_packet_id,
            size=size,
            src_node=src_node,
            dst_node=dst_node,
            msg_kind=msg_kind,
            priority=priority,
            created_at=self.now if created_at is None else created_at,
            flow_id=flow_id,
            msg_id=msg_id,
            explicit_route=explicit_route,
            lsp_id=lsp_id,
            mapped_label=mapped_label,
            reason=reason,
            node=src_node,
        )
        packet.token = self.kernel.new_token(priority, payload=packet)
        self.live[packet.id] = packet
        self.flow(flow_id).sent += 1
        self.sent_by_kind[msg_kind] += 1
        self.nodes[src_node].counters.originated += 1
        return packet

    def inject(self, packet: Packet, delay: float = 0.0) -> int:
        """Schedule a new control message to enter the network at its source."""
        return self.kernel.schedule(EventKind.CONTROL_ARRIVAL, delay, packet.token)

    def forward(self, packet: Packet) -> int:
        return self.kernel.schedule(EventKind.LINK_TRANSMIT_REQUEST, 0.0, packet.token)

    def handle_transmit_request(self, token: Token) -> None:
        packet: Packet = token.payload
        self.transmit_request(packet, packet.node)

    def transmit_request(self, packet: Packet, node_id: int, *, police: bool = True) -> None:
        """
        Choose the outgoing link for a packet at a node and queue it there.

        Explicit routes take precedence, then label switching for DATA, then
        the node's static routes. police=False skips the LSP policer for a
        packet that is routed a second time at the same node.
        """
        node = self.nodes[node_id]
        packet.node = node_id
        packet.in_label = packet.label
        if packet.hops >= self.hop_limit:
            self.drop(packet, DropCause.TTL, node_id=node_id)
            return

        next_node = None
        out_label = None
        if packet.explicit_route is not None:
            next_node = packet.next_explicit_hop()
        else:
            if packet.is_data and self.control is not None:
                decision = self.control.label_forward(packet, node_id)
                if decision is not None and decision.pop:
                    packet.label = None
                    if packet.dst_node == node_id:
                        self.deliver(packet, node_id)
                        return
                elif decision is not None:
                    if decision.pushed and police and not self._police(("lsp", decision.lsp_id), packet, node_id):
                        return
                    next_node = decision.next_node
                    out_label = decision.out_label
            if next_node is None:
                next_node = node.static_routes.get(packet.dst_node)

        link = node.links.get(next_node) if next_node is not None else None
        if link is None:
            self.drop(packet, DropCause.NO_ROUTE, node_id=node_id)
            return
        if not link.up:
            self.drop(packet, DropCause.LINK_DOWN, node_id=node_id, link=link)
            return

        packet.label = out_label
        packet.link = link
        node.counters.forwarded += 1
        facility = link.tx_facility
        if packet.is_control and link.control_facility is not None:
            facility = link.control_facility
        self.kernel.request(facility, packet.token, packet.priority, link.transmission_time(packet.size))

    def propagate(self, token: Token) -> None:
        """Put a packet whose transmission just ended on the medium."""
        packet: Packet = token.payload
        link = packet.link
        if not link.up:
            self.drop(packet, DropCause.LINK_FAILURE, link=link)
            return
        outcome = self.kernel.request(link.medium_facility, token, packet.priority, link.prop_delay)
        if outcome is not ServiceOutcome.SERVED:
            raise FacilityError(f"medium of link {link.name} ran out of servers")
        packet.arrival_event_id = self.kernel.schedule(EventKind.NODE_ARRIVAL, link.prop_delay, token)
        link.in_medium[packet.id] = token

    def node_arrival(self, token: Token) -> None:
        packet: Packet = token.payload
        link = packet.link
        link.in_medium.pop(packet.id, None)
        if token.facility is link.medium_facility:
            self.kernel.release(link.medium_facility, token.slot)
        packet.arrival_event_id = None
        packet.link = None
        node_id = link.to_node
        packet.node = node_id
        packet.hops += 1
        self.nodes[node_id].counters.received += 1
        if packet.explicit_route is not None:
            packet.route_index += 1

        if packet.is_control:
            if self.control is None:
                self.deliver(packet, node_id)
            else:
                self.control.process_control_message(packet, node_id)
            return
        if packet.dst_node == node_id:
            if packet.label is not None and self.control is not None:
                self.control.label_forward(packet, node_id)
            packet.label = None
            self.deliver(packet, node_id)
            return
        self.forward(packet)

    def deliver(self, packet: Packet, node_id: int) -> None:
        """Terminate a packet at a node: a DATA delivery or a consumed control message."""
        self.nodes[node_id].counters.delivered += 1
        self.live.pop(packet.id, None)
        record_delivery(self.flow(packet.flow_id), packet, self.now)

    def drop(
        self,
        packet: Packet,
        cause: DropCause,
        *,
        node_id: int | None = None,
        link: Link | None = None,
    ) -> None:
        self.drop_causes[cause] += 1
        self.flow(packet.flow_id).dropped += 1
        self.live.pop(packet.id, None)
        if node_id is not None:
            self.nodes[node_id].counters.dropped += 1
        if link is not None:
            link.drop_count += 1
        self.drop_log.append(
            DropRecord(
                time=self.now,
                packet_id=packet.id,
                flow_id=packet.flow_id,
                msg_kind=packet.msg_kind,
                cause=cause,
                node=node_id,
                link=link.key if link is not None else None,
            )
        )
        logger.debug(
            "Dropped %s: %s",
            packet.describe(),
            cause.value,
            extra={"sim_time": self.now, "cause": cause.value},
        )

    def in_flight(self, flow_id: int | str) -> int:
        return sum(1 for packet in self.live.values() if packet.flow_id == flow_id)

    # Failures

    def _duplex(self, a: int, b: int) -> tuple[Link, Link]:
        forward, backward = self.link(a, b), self.link(b, a)
        if forward is None or backward is None:
            raise ConfigError(f"no link {a}-{b}")
        return forward, backward

    def fail_link(self, a: int, b: int) -> int:
        """
        Take both directions of a duplex link down.

        Packets being transmitted or propagating on the link are dropped now;
        packets still queued stay queued. Returns the number dropped.
        """
        kernel = self.kernel
        dropped = 0
        for link in self._duplex(a, b):
            if not link.up:
                continue
            link.up = False
            for facility in link.facilities():
                kernel.set_facility_up(facility, False)
            for facility in link.transmitters():
                for _, server in list(facility.busy_slots()):
                    token = server.token
                    kernel.abort_service(facility, token)
                    self.drop(token.payload, DropCause.LINK_FAILURE, link=link)
                    dropped += 1
            for token in list(link.in_medium.values()):
                packet: Packet = token.payload
                kernel.abort_service(link.medium_facility, token)
                kernel.cancel(packet.arrival_event_id)
                packet.arrival_event_id = None
                self.drop(packet, DropCause.LINK_FAILURE, link=link)
                dropped += 1
            link.in_medium.clear()
        logger.info(
            "Link %s-%s failed, %s packets dropped",
            a,
            b,
            dropped,
            extra={"link": f"{a}-{b}", "sim_time": self.now},
        )
        return dropped

    def reroute_queued(self, link: Link) -> int:
        """
        Route every packet waiting at a link's transmitters again from the
        link's head node, in service order. Returns the number moved.

        Packets whose route still leads over the link are dropped there if it
        is down.
        """
        moved = 0
        for facility in link.transmitters():
            for token in self.kernel.withdraw_queue(facility):
                packet: Packet = token.payload
                packet.link = None
                packet.label = packet.in_label
                self.transmit_request(packet, link.from_node, police=False)
                moved += 1
        if moved:
            logger.info(
                "Rerouted %s packets queued on link %s",
                moved,
                link.name,
                extra={"link": link.name, "sim_time": self.now},
            )
        return moved

    def restore_link(self, a: int, b: int) -> None:
        for link in self._duplex(a, b):
            if link.up:
                continue
            link.up = True
            for facility in link.facilities():
                self.kernel.set_facility_up(facility, True)
        logger.info("Link %s-%s restored", a, b, extra={"link": f"{a}-{b}", "sim_time": self.now})

    def link_drops(self) -> dict[str, int]:
        return {link.name: link.drop_count for key, link in sorted(self.links.items())}
