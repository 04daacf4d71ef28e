"""
Label Information Base.

Each node allocates its own labels, counting up from the first unreserved
label. Swap and pop entries are found by (node, in_label); ingress push
entries have no in_label and are found by (node, lsp_id), as is every
other entry.
"""

from __future__ import annotations

from dataclasses import dataclass

from lspsim.errors import ConfigError


@dataclass
class LibEntry:
    node: int
    in_label: int | None
    prev_node: int | None
    out_label: int | None
    next_node: int | None
    lsp_id: int

    @property
    def is_push(self) -> bool:
        return self.in_label is None

    @property
    def is_pop(self) -> bool:
        return self.out_label is None


class Lib:
    def __init__(self, first_label: int = 16):
        self.first_label = first_label
        self._next_label: dict[int, int] = {}
        self._by_label: dict[tuple[int, int], LibEntry] = {}
        self._by_lsp: dict[tuple[int, int], LibEntry] = {}
        self.misses = 0

    def __len__(self):
        return len(self._by_lsp)

    def allocate(self, node: int) -> int:
        label = self._next_label.get(node, self.first_label)
        self._next_label[node] = label + 1
        return label

    def install(self, entry: LibEntry) -> LibEntry:
        key = (entry.node, entry.lsp_id)
        if key in self._by_lsp:
            raise ConfigError(f"LSP {entry.lsp_id} already has a label entry at node {entry.node}")
        if entry.in_label is not None:
            if (entry.node, entry.in_label) in self._by_label:
                raise ConfigError(f"label {entry.in_label} is already bound at node {entry.node}")
            self._by_label[(entry.node, entry.in_label)] = entry
        self._by_lsp[key] = entry
        return entry

    def lookup(self, node: int, in_label: int) -> LibEntry | None:
        return self._by_label.get((node, in_label))

    def entry(self, node: int, lsp_id: int) -> LibEntry | None:
        return self._by_lsp.get((node, lsp_id))

    def entries_at(self, node: int) -> list[LibEntry]:
        return [entry for (entry_node, _), entry in sorted(self._by_lsp.items()) if entry_node == node]

    def remove_lsp(self, lsp_id: int) -> int:
        keys = [key for key in self._by_lsp if key[1] == lsp_id]
        for key in keys:
            entry = self._by_lsp.pop(key)
            if entry.in_label is not None:
                self._by_label.pop((entry.node, entry.in_label), None)
        return len(keys)
