"""
Per-link bandwidth reservations.
"""

from __future__ import annotations

from dataclasses import dataclass

from lspsim.netshell import Link


@dataclass
class Reservation:
    lsp_id: int
    bandwidth: float
    tentative: bool = True


class ReservationLedger:
    """Reservations on one simplex link; their sum never exceeds the link bandwidth."""

    def __init__(self, link: Link):
        self.link = link
        self.capacity = link.bandwidth
        self.entries: dict[int, Reservation] = {}

    def __repr__(self):
        return f"ReservationLedger({self.link.name}, reserved={self.reserved}/{self.capacity})"

    @property
    def reserved(self) -> float:
        return sum(reservation.bandwidth for reservation in self.entries.values())

    @property
    def confirmed(self) -> float:
        return sum(r.bandwidth for r in self.entries.values() if not r.tentative)

    def shares(self, lsp_id: int, protects: int | None) -> bool:
        return protects is not None and protects in self.entries and lsp_id not in self.entries

    def reserve(self, lsp_id: int, bandwidth: float, protects: int | None = None) -> bool:
        """
        Tentatively reserve bandwidth for an LSP.

        A backup crossing a link its protected LSP already holds reuses that
        reservation and adds no entry.
        """
        if self.shares(lsp_id, protects):
            return True
        current = self.entries.get(lsp_id)
        others = self.reserved - (current.bandwidth if current else 0.0)
        if others + bandwidth > self.capacity:
            return False
        self.entries[lsp_id] = Reservation(lsp_id, bandwidth, tentative=True)
        self._sync()
        return True

    def confirm(self, lsp_id: int) -> bool:
        reservation = self.entries.get(lsp_id)
        if reservation is None:
            return False
        reservation.tentative = False
        return True

    def release(self, lsp_id: int) -> bool:
        removed = self.entries.pop(lsp_id, None) is not None
        self._sync()
        return removed

    def _sync(self) -> None:
        self.link.reserved_bw = self.reserved
