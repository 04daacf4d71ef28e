"""
RSVP-TE style control plane.

LSPs are set up hop by hop: a PATH message travels the explicit route
reserving bandwidth tentatively, and the RESV coming back confirms the
reservations and binds labels from the tail towards the head. Backups
(detours) are signaled the same way once the LSP they protect is up, and
stay dormant until a node loses its HELLO adjacency over a protected link
and splices the protected LSP onto the detour locally.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from lspsim.errors import ConfigError
from lspsim.kernel import EventKind, Kernel, Token, Uniform
from lspsim.netshell import (
    SIGNALING_KINDS,
    DropCause,
    ForwardingDecision,
    Link,
    MsgKind,
    NetShell,
    Packet,
)

from .hello import HelloAdjacency
from .ledger import ReservationLedger
from .lib import Lib, LibEntry
from .lsp import Lsp, LspKind, LspState
from .timers import Timers

logger = logging.getLogger(__name__)

HELLO_STREAM = 1
REFRESH_STREAM = 2


@dataclass(frozen=True, slots=True)
class SignalingRecord:
    time: float
    kind: MsgKind
    lsp_id: int
    node: int


@dataclass(frozen=True, slots=True)
class DetectionRecord:
    time: float
    node: int
    neighbor: int
    spliced: int
    unprotected: int


@dataclass(frozen=True, slots=True)
class SetupError:
    time: float
    lsp_id: int
    node: int
    reason: str
    # a fatal error aborts the run
    fatal: bool


class ControlPlane:
    def __init__(
        self,
        kernel: Kernel,
        shell: NetShell,
        timers: Timers | None = None,
        *,
        first_label: int = 16,
    ):
        self.kernel = kernel
        self.shell = shell
        self.timers = timers or Timers()
        self.lsps: dict[int, Lsp] = {}
        self.lib = Lib(first_label)
        self.ledgers: dict[tuple[int, int], ReservationLedger] = {}
        self.adjacencies: dict[tuple[int, int], HelloAdjacency] = {}
        self.signaling_log: list[SignalingRecord] = []
        self.detections: list[DetectionRecord] = []
        self.setup_errors: list[SetupError] = []
        self.stale_messages = 0
        self._refresh_jitter = Uniform(kernel.stream(REFRESH_STREAM), 0.5, 1.5)
        self._handlers = {
            MsgKind.PATH_LABEL_REQUEST: self._on_path,
            MsgKind.PATH_DETOUR: self._on_path,
            MsgKind.RESV_LABEL_MAPPING: self._on_resv,
            MsgKind.RESV: self._on_resv,
            MsgKind.PATH_ERROR: self._on_path_error,
            MsgKind.PATH_REFRESH: self._on_path_refresh,
            MsgKind.RESV_REFRESH: self._on_resv_refresh,
            MsgKind.HELLO: self._on_hello,
            MsgKind.HELLO_ACK: self._on_hello_ack,
        }
        shell.attach_control(self)

    def __repr__(self):
        return f"ControlPlane(lsps={len(self.lsps)}, adjacencies={len(self.adjacencies)})"

    @property
    def now(self) -> float:
        return self.kernel.clock

    def ledger(self, a: int, b: int) -> ReservationLedger:
        ledger = self.ledgers.get((a, b))
        if ledger is None:
            link = self.shell.link(a, b)
            if link is None:
                raise ConfigError(f"no link {a}-{b}")
            ledger = self.ledgers[(a, b)] = ReservationLedger(link)
        return ledger

    # LSP setup

    def set_lsp(
        self,
        ingress: int,
        egress: int,
        explicit_route,
        bandwidth_req: float = 0.0,
        *,
        lsp_id: int | None = None,
        optional: bool = False,
    ) -> int:
        route = tuple(explicit_route)
        self._check_route(route, ingress, egress)
        lsp = Lsp(
            lsp_id=self._claim_id(lsp_id),
            kind=LspKind.PRIMARY,
            ingress=ingress,
            egress=egress,
            explicit_route=route,
            bandwidth_req=bandwidth_req,
            optional=optional,
        )
        self.lsps[lsp.lsp_id] = lsp
        self._signal(lsp)
        return lsp.lsp_id

    def set_backup_lsp(
        self,
        protects: int,
        merge_start: int,
        merge_end: int,
        explicit_route,
        *,
        lsp_id: int | None = None,
    ) -> int:
        primary = self.lsps.get(protects)
        if primary is None or not primary.is_primary:
            raise ConfigError(f"backup protects unknown primary LSP {protects}")
        route = tuple(explicit_route)
        for merge_point in (merge_start, merge_end):
            if merge_point not in primary.explicit_route:
                raise ConfigError(f"merge point {merge_point} is not on the route of LSP {protects}")
        if primary.position(merge_start) >= primary.position(merge_end):
            raise ConfigError(f"merge start {merge_start} must precede merge end {merge_end} on LSP {protects}")
        self._check_route(route, merge_start, merge_end)
        backup = Lsp(
            lsp_id=self._claim_id(lsp_id),
            kind=LspKind.BACKUP,
            ingress=merge_start,
            egress=merge_end,
            explicit_route=route,
            bandwidth_req=primary.bandwidth_req,
            protects=protects,
            merge_start=merge_start,
            merge_end=merge_end,
        )
        self.lsps[backup.lsp_id] = backup
        if primary.is_up:
            self._signal(backup)
        elif primary.state is LspState.SIGNALING:
            backup.held = True
        else:
            self._fail(backup, merge_start, f"protected LSP {protects} is {primary.state.value}")
        return backup.lsp_id

    def _claim_id(self, lsp_id: int | None) -> int:
        if lsp_id is None:
            lsp_id = max(self.lsps, default=0) + 1
        if lsp_id in self.lsps:
            raise ConfigError(f"duplicate LSP id {lsp_id}")
        return lsp_id

    def _check_route(self, route: tuple[int, ...], head: int, tail: int) -> None:
        if len(route) < 2:
            raise ConfigError(f"route {route} needs at least two nodes")
        if route[0] != head or route[-1] != tail:
            raise ConfigError(f"route {'-'.join(map(str, route))} must run from {head} to {tail}")
        if len(set(route)) != len(route):
            raise ConfigError(f"route {'-'.join(map(str, route))} visits a node twice")
        for a, b in zip(route, route[1:]):
            if self.shell.link(a, b) is None:
                raise ConfigError(f"route {'-'.join(map(str, route))} uses missing link {a}-{b}")

    def _signal(self, lsp: Lsp) -> None:
        now = self.now
        lsp.held = False
        lsp.state = LspState.SIGNALING
        lsp.signaled_at = now
        lsp.last_refresh_at = {lsp.head: now}
        if not self._admit(lsp, lsp.head):
            self._fail(lsp, lsp.head, f"admission failed on link {lsp.head}-{lsp.next_hop(lsp.head)}")
            return
        kind = MsgKind.PATH_LABEL_REQUEST if lsp.is_primary else MsgKind.PATH_DETOUR
        self.shell.inject(self._message(kind, lsp, lsp.explicit_route))
        logger.info(
            "Signaling %s LSP %s along %s",
            lsp.kind.value.lower(),
            lsp.lsp_id,
            "-".join(map(str, lsp.explicit_route)),
            extra={"lsp_id": lsp.lsp_id, "sim_time": now},
        )

    def _admit(self, lsp: Lsp, node: int) -> bool:
        return self.ledger(node, lsp.next_hop(node)).reserve(lsp.lsp_id, lsp.bandwidth_req, protects=lsp.protects)

    def _release_reservations(self, lsp: Lsp) -> None:
        for a, b in lsp.hops():
            ledger = self.ledgers.get((a, b))
            if ledger is not None:
                ledger.release(lsp.lsp_id)

    def _message(self, kind: MsgKind, lsp: Lsp, route, **fields) -> Packet:
        route = tuple(route)
        packet = self.shell.new_packet(
            self.timers.path_msg_size,
            route[0],
            route[-1],
            msg_kind=kind,
            explicit_route=route,
            lsp_id=lsp.lsp_id,
            **fields,
        )
        if kind in SIGNALING_KINDS:
            self.signaling_log.append(SignalingRecord(self.now, kind, lsp.lsp_id, route[0]))
        return packet

    def _mark_up(self, lsp: Lsp) -> None:
        lsp.state = LspState.UP
        lsp.up_at = self.now
        logger.info(
            "LSP %s is up",
            lsp.lsp_id,
            extra={"lsp_id": lsp.lsp_id, "sim_time": self.now},
        )
        self.refresh_all_lsps()
        if lsp.is_primary:
            for backup in self._held_backups(lsp.lsp_id):
                self._signal(backup)

    def _fail(self, lsp: Lsp, node: int, reason: str) -> None:
        lsp.state = LspState.FAILED
        lsp.error = reason
        self._release_reservations(lsp)
        self.lib.remove_lsp(lsp.lsp_id)
        self.setup_errors.append(
            SetupError(self.now, lsp.lsp_id, node, reason, fatal=lsp.is_primary and not lsp.optional)
        )
        logger.warning(
            "LSP %s failed at node %s: %s",
            lsp.lsp_id,
            node,
            reason,
            extra={"lsp_id": lsp.lsp_id, "node": node, "sim_time": self.now},
        )
        if lsp.is_primary:
            for backup in self._held_backups(lsp.lsp_id):
                self._fail(backup, backup.head, f"protected LSP {lsp.lsp_id} failed")

    def _held_backups(self, primary_id: int) -> list[Lsp]:
        return [
            lsp
            for _, lsp in sorted(self.lsps.items())
            if lsp.held and lsp.protects == primary_id and lsp.state is LspState.SIGNALING
        ]

    # Control messages

    def control_arrival(self, token: Token) -> None:
        """A new control message enters the network at its source node."""
        packet: Packet = token.payload
        if packet.msg_kind is MsgKind.HELLO:
            adjacency = self.adjacencies.get((packet.src_node, packet.dst_node))
            if adjacency is not None:
                adjacency.on_hello_sent(self.now)
        self.shell.transmit_request(packet, packet.node)

    def process_control_message(self, packet: Packet, node_id: int) -> None:
        self._handlers[packet.msg_kind](packet, node_id)

    def _current_lsp(self, packet: Packet, node: int, *states: LspState) -> Lsp | None:
        lsp = self.lsps.get(packet.lsp_id)
        if lsp is not None and lsp.state in states:
            return lsp
        self.stale_messages += 1
        self.shell.drop(packet, DropCause.STALE, node_id=node)
        logger.warning(
            "Discarded stale %s for LSP %s at node %s",
            packet.msg_kind.value,
            packet.lsp_id,
            node,
            extra={"lsp_id": packet.lsp_id, "node": node, "sim_time": self.now},
        )
        return None

    def _on_path(self, packet: Packet, node: int) -> None:
        lsp = self._current_lsp(packet, node, LspState.SIGNALING)
        if lsp is None:
            return
        lsp.last_refresh_at[node] = self.now
        if node != lsp.tail:
            if self._admit(lsp, node):
                self.shell.forward(packet)
                return
            self.shell.deliver(packet, node)
            self._path_error(lsp, node, f"admission failed on link {node}-{lsp.next_hop(node)}")
            return

        self.shell.deliver(packet, node)
        out_label = next_node = None
        if not lsp.is_primary:
            merge = self.lib.entry(node, lsp.protects)
            if merge is None:
                self._path_error(lsp, node, f"LSP {lsp.protects} has no label entry at merge point {node}")
                return
            out_label, next_node = merge.out_label, merge.next_node
        label = self.lib.allocate(node)
        self.lib.install(LibEntry(node, label, lsp.previous_hop(node), out_label, next_node, lsp.lsp_id))
        kind = MsgKind.RESV_LABEL_MAPPING if lsp.is_primary else MsgKind.RESV
        self.shell.inject(self._message(kind, lsp, reversed(lsp.explicit_route), mapped_label=label))

    def _path_error(self, lsp: Lsp, node: int, reason: str) -> None:
        lsp.error = reason
        upstream = reversed(lsp.explicit_route[: lsp.position(node) + 1])
        self.shell.inject(self._message(MsgKind.PATH_ERROR, lsp, upstream, reason=reason))

    def _on_path_error(self, packet: Packet, node: int) -> None:
        lsp = self._current_lsp(packet, node, LspState.SIGNALING)
        if lsp is None:
            return
        self.ledger(node, lsp.next_hop(node)).release(lsp.lsp_id)
        if node != lsp.head:
            self.shell.forward(packet)
            return
        self.shell.deliver(packet, node)
        self._fail(lsp, node, packet.reason or "path error")

    def _on_resv(self, packet: Packet, node: int) -> None:
        lsp = self._current_lsp(packet, node, LspState.SIGNALING)
        if lsp is None:
            return
        next_node = lsp.next_hop(node)
        self.ledger(node, next_node).confirm(lsp.lsp_id)
        if node == lsp.head:
            self.shell.deliver(packet, node)
            self.lib.install(LibEntry(node, None, None, packet.mapped_label, next_node, lsp.lsp_id))
            self._mark_up(lsp)
            return
        label = self.lib.allocate(node)
        self.lib.install(LibEntry(node, label, lsp.previous_hop(node), packet.mapped_label, next_node, lsp.lsp_id))
        packet.mapped_label = label
        self.shell.forward(packet)

    def _on_path_refresh(self, packet: Packet, node: int) -> None:
        lsp = self._current_lsp(packet, node, LspState.UP)
        if lsp is None:
            return
        lsp.last_refresh_at[node] = self.now
        if node != lsp.tail:
            self.shell.forward(packet)
            return
        self.shell.deliver(packet, node)
        self.shell.inject(self._message(MsgKind.RESV_REFRESH, lsp, reversed(lsp.explicit_route)))

    def _on_resv_refresh(self, packet: Packet, node: int) -> None:
        lsp = self._current_lsp(packet, node, LspState.UP)
        if lsp is None:
            return
        lsp.last_refresh_at[node] = self.now
        if node != lsp.head:
            self.shell.forward(packet)
            return
        self.shell.deliver(packet, node)

    def _on_hello(self, packet: Packet, node: int) -> None:
        self.shell.deliver(packet, node)
        ack = self.shell.new_packet(
            self.timers.hello_msg_size,
            node,
            packet.src_node,
            msg_kind=MsgKind.HELLO_ACK,
            explicit_route=(node, packet.src_node),
        )
        self.shell.transmit_request(ack, node)

    def _on_hello_ack(self, packet: Packet, node: int) -> None:
        self.shell.deliver(packet, node)
        adjacency = self.adjacencies.get((node, packet.src_node))
        if adjacency is not None and adjacency.on_ack(self.now):
            logger.info(
                "HELLO adjacency %s->%s is back",
                node,
                packet.src_node,
                extra={"node": node, "sim_time": self.now},
            )

    # Label switching

    def bound_lsp(self, node: int, dst: int) -> Lsp | None:
        """The lowest-id up primary LSP from node to dst, if any."""
        for _, lsp in sorted(self.lsps.items()):
            if lsp.is_primary and lsp.is_up and lsp.ingress == node and lsp.egress == dst:
                return lsp
        return None

    def label_forward(self, packet: Packet, node_id: int) -> ForwardingDecision | None:
        if packet.label is None:
            lsp = self.bound_lsp(node_id, packet.dst_node)
            entry = self.lib.entry(node_id, lsp.lsp_id) if lsp is not None else None
            if entry is None:
                return None
            return ForwardingDecision(entry.next_node, entry.out_label, lsp_id=entry.lsp_id, pushed=True)

        entry = self.lib.lookup(node_id, packet.label)
        if entry is None:
            self.lib.misses += 1
            logger.warning(
                "No label entry for label %s at node %s",
                packet.label,
                node_id,
                extra={"node": node_id, "sim_time": self.now},
            )
            packet.label = None
            return None
        if entry.is_pop:
            return ForwardingDecision(pop=True, lsp_id=entry.lsp_id)
        return ForwardingDecision(entry.next_node, entry.out_label, lsp_id=entry.lsp_id)

    # Soft state

    def refresh_all_lsps(self) -> int:
        """Arm a refresh for every up LSP that has none pending."""
        armed = 0
        for _, lsp in sorted(self.lsps.items()):
            if lsp.is_up and lsp.refresh_event_id is None:
                delay = self._refresh_jitter.sample() * self.timers.refresh_period
                lsp.refresh_event_id = self.kernel.schedule(EventKind.REFRESH_LSP_STATES, delay, lsp)
                armed += 1
        return armed

    def refresh_lsp(self, lsp: Lsp) -> None:
        lsp.refresh_event_id = None
        if not lsp.is_up:
            return
        lsp.last_refresh_at[lsp.head] = self.now
        self.shell.inject(self._message(MsgKind.PATH_REFRESH, lsp, lsp.explicit_route))
        self.refresh_all_lsps()

    def _expire(self, lsp: Lsp, state: LspState) -> None:
        was_signaling = lsp.state is LspState.SIGNALING
        lsp.state = state
        self._release_reservations(lsp)
        self.lib.remove_lsp(lsp.lsp_id)
        if lsp.refresh_event_id is not None:
            self.kernel.cancel(lsp.refresh_event_id)
            lsp.refresh_event_id = None
        if was_signaling:
            lsp.error = "setup did not complete"
            self.setup_errors.append(
                SetupError(self.now, lsp.lsp_id, lsp.head, lsp.error, fatal=lsp.is_primary and not lsp.optional)
            )
        logger.warning(
            "LSP %s %s",
            lsp.lsp_id,
            state.value.lower().replace("_", " "),
            extra={"lsp_id": lsp.lsp_id, "sim_time": self.now},
        )

    # HELLO liveness and local repair

    def create_adjacencies(self) -> list[HelloAdjacency]:
        """One adjacency per simplex link, each with its own emission phase."""
        phases = Uniform(self.kernel.stream(HELLO_STREAM), 0.0, self.timers.hello_interval)
        for key in sorted(self.shell.links):
            if key not in self.adjacencies:
                self.adjacencies[key] = HelloAdjacency(*key, phase_offset=phases.sample())
        return list(self.adjacencies.values())

    def generate_hellos(self) -> int:
        now = self.now
        for adjacency in self.adjacencies.values():
            hello = self.shell.new_packet(
                self.timers.hello_msg_size,
                adjacency.local,
                adjacency.neighbor,
                msg_kind=MsgKind.HELLO,
                explicit_route=adjacency.key,
                created_at=now + adjacency.phase_offset,
            )
            self.shell.inject(hello, adjacency.phase_offset)
        return len(self.adjacencies)

    def timeout_sweep(self) -> list[DetectionRecord]:
        now = self.now
        timers = self.timers
        detected = []
        for adjacency in self.adjacencies.values():
            if not adjacency.expired(now, timers.hello_ack_timeout):
                continue
            adjacency.alive = False
            adjacency.detections += 1
            logger.info(
                "Node %s lost its HELLO adjacency with %s",
                adjacency.local,
                adjacency.neighbor,
                extra={"node": adjacency.local, "link": f"{adjacency.local}-{adjacency.neighbor}", "sim_time": now},
            )
            spliced, unprotected = self._repair(adjacency.local, self.shell.link(*adjacency.key))
            record = DetectionRecord(now, adjacency.local, adjacency.neighbor, spliced, unprotected)
            self.detections.append(record)
            detected.append(record)

        for _, lsp in sorted(self.lsps.items()):
            if lsp.is_up:
                stalest = lsp.stalest_refresh()
                if stalest is not None and now - stalest > timers.state_timeout:
                    self._expire(lsp, LspState.TIMED_OUT)
            elif lsp.state is LspState.SIGNALING and not lsp.held:
                if now - lsp.signaled_at > timers.state_timeout:
                    self._expire(lsp, LspState.TORN_DOWN)
        return detected

    def fast_reroute(self, node: int, failed_link: Link) -> int:
        """Splice every protected LSP at node away from failed_link; returns the number spliced."""
        spliced, _ = self._repair(node, failed_link)
        return spliced

    def _repair(self, node: int, failed_link: Link) -> tuple[int, int]:
        spliced, unprotected = self._splice(node, failed_link)
        # packets stranded behind the failure follow the new LIB
        self.shell.reroute_queued(failed_link)
        return spliced, unprotected

    def _splice(self, node: int, failed_link: Link) -> tuple[int, int]:
        spliced = unprotected = 0
        for _, lsp in sorted(self.lsps.items()):
            if not (lsp.is_primary and lsp.is_up):
                continue
            entry = self.lib.entry(node, lsp.lsp_id)
            if entry is None or entry.next_node != failed_link.to_node:
                continue
            detour = self._detour_at(lsp, node, failed_link)
            if detour is None:
                unprotected += 1
                logger.warning(
                    "LSP %s has no detour at node %s",
                    lsp.lsp_id,
                    node,
                    extra={"lsp_id": lsp.lsp_id, "node": node, "sim_time": self.now},
                )
                continue
            entry.out_label = detour.out_label
            entry.next_node = detour.next_node
            lsp.spliced_onto = detour.lsp_id
            spliced += 1
            logger.info(
                "LSP %s spliced onto detour %s at node %s",
                lsp.lsp_id,
                detour.lsp_id,
                node,
                extra={"lsp_id": lsp.lsp_id, "node": node, "sim_time": self.now},
            )
        return spliced, unprotected

    def _detour_at(self, lsp: Lsp, node: int, failed_link: Link) -> LibEntry | None:
        for _, backup in sorted(self.lsps.items()):
            if backup.protects != lsp.lsp_id or backup.merge_start != node or not backup.is_up:
                continue
            entry = self.lib.entry(node, backup.lsp_id)
            if entry is not None and entry.next_node != failed_link.to_node:
                return entry
        return None

    def signaling_between(self, start: float, end: float, kinds=None) -> list[SignalingRecord]:
        return [
            record
            for record in self.signaling_log
            if start <= record.time <= end and (kinds is None or record.kind in kinds)
        ]
