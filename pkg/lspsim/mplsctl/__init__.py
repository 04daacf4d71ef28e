from .control import ControlPlane, DetectionRecord, SetupError, SignalingRecord
from .hello import HelloAdjacency
from .ledger import Reservation, ReservationLedger
from .lib import Lib, LibEntry
from .lsp import Lsp, LspKind, LspState
from .timers import Timers

__all__ = [
    "ControlPlane",
    "DetectionRecord",
    "HelloAdjacency",
    "Lib",
    "LibEntry",
    "Lsp",
    "LspKind",
    "LspState",
    "Reservation",
    "ReservationLedger",
    "SetupError",
    "SignalingRecord",
    "Timers",
]
