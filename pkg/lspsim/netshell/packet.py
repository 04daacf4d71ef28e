"""
Packets: the token payload carried through links and nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from lspsim.kernel import Token

    from .topology import Link

CONTROL_FLOW = "control"


class MsgKind(Enum):
    DATA = "DATA"
    PATH_LABEL_REQUEST = "PATH_LABEL_REQUEST"
    RESV_LABEL_MAPPING = "RESV_LABEL_MAPPING"
    PATH_DETOUR = "PATH_DETOUR"
    PATH_REFRESH = "PATH_REFRESH"
    RESV_REFRESH = "RESV_REFRESH"
    HELLO = "HELLO"
    HELLO_ACK = "HELLO_ACK"
    RESV = "RESV"
    PATH_ERROR = "PATH_ERROR"


# Messages that set up, confirm or tear down LSP state
SETUP_KINDS = frozenset(
    {
        MsgKind.PATH_LABEL_REQUEST,
        MsgKind.RESV_LABEL_MAPPING,
        MsgKind.PATH_DETOUR,
        MsgKind.RESV,
        MsgKind.PATH_ERROR,
    }
)
REFRESH_KINDS = frozenset({MsgKind.PATH_REFRESH, MsgKind.RESV_REFRESH})
SIGNALING_KINDS = SETUP_KINDS | REFRESH_KINDS
HELLO_KINDS = frozenset({MsgKind.HELLO, MsgKind.HELLO_ACK})


@dataclass(eq=False, slots=True)
class Packet:
    id: int
    size: int
    src_node: int
    dst_node: int
    msg_kind: MsgKind = MsgKind.DATA
    priority: int = 0
    created_at: float = 0.0
    flow_id: int | str = CONTROL_FLOW
    label: int | None = None
    # label carried on arrival at the current node
    in_label: int | None = None
    msg_id: int | None = None
    explicit_route: tuple[int, ...] | None = None
    # index of the current node within explicit_route
    route_index: int = 0
    lsp_id: int | None = None
    # label advertised upstream by a RESV
    mapped_label: int | None = None
    reason: str | None = None
    hops: int = 0
    node: int | None = None
    link: Link | None = None
    token: Token | None = None
    arrival_event_id: int | None = None

    @property
    def is_data(self) -> bool:
        return self.msg_kind is MsgKind.DATA

    @property
    def is_control(self) -> bool:
        return self.msg_kind is not MsgKind.DATA

    def next_explicit_hop(self) -> int | None:
        route = self.explicit_route
        if route is None or self.route_index + 1 >= len(route):
            return None
        return route[self.route_index + 1]

    def describe(self) -> str:
        where = f"link={self.link.name}" if self.link is not None else f"node={self.node}"
        return f"pkt={self.id} {self.msg_kind.value} flow={self.flow_id} {where}"
