from .generators import GeneratorKind, GeneratorState, TrafficGenerator
from .metrics import DeliveryRecord, FlowMetrics, record_delivery
from .packet import CONTROL_FLOW, HELLO_KINDS, REFRESH_KINDS, SETUP_KINDS, SIGNALING_KINDS, MsgKind, Packet
from .policer import Policer, Verdict
from .shell import (
    DEDICATED_CHANNEL,
    SHARED_CHANNEL,
    ControlPlaneHooks,
    DropCause,
    DropRecord,
    ForwardingDecision,
    NetShell,
)
from .topology import Link, Node, NodeCounters

__all__ = [
    "CONTROL_FLOW",
    "DEDICATED_CHANNEL",
    "HELLO_KINDS",
    "REFRESH_KINDS",
    "SETUP_KINDS",
    "SHARED_CHANNEL",
    "SIGNALING_KINDS",
    "ControlPlaneHooks",
    "DeliveryRecord",
    "DropCause",
    "DropRecord",
    "FlowMetrics",
    "ForwardingDecision",
    "GeneratorKind",
    "GeneratorState",
    "Link",
    "MsgKind",
    "NetShell",
    "Node",
    "NodeCounters",
    "Packet",
    "Policer",
    "TrafficGenerator",
    "Verdict",
    "record_delivery",
]
