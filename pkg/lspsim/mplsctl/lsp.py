from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class LspKind(Enum):
    PRIMARY = "PRIMARY"
    BACKUP = "BACKUP"


class LspState(Enum):
    SIGNALING = "SIGNALING"
    UP = "UP"
    TIMED_OUT = "TIMED_OUT"
    TORN_DOWN = "TORN_DOWN"
    FAILED = "FAILED"


@dataclass(eq=False)
class Lsp:
    lsp_id: int
    kind: LspKind
    ingress: int
    egress: int
    explicit_route: tuple[int, ...]
    bandwidth_req: float = 0.0
    state: LspState = LspState.SIGNALING
    protects: int | None = None
    merge_start: int | None = None
    merge_end: int | None = None
    optional: bool = False
    # node -> time of the last PATH or refresh seen there
    last_refresh_at: dict[int, float] = field(default_factory=dict)
    signaled_at: float | None = None
    up_at: float | None = None
    error: str | None = None
    refresh_event_id: int | None = None
    # backup currently carrying this LSP's traffic
    spliced_onto: int | None = None
    # a backup held until its protected LSP is up
    held: bool = False

    def __repr__(self):
        return f"Lsp({self.lsp_id}, {self.kind.value}, {'-'.join(map(str, self.explicit_route))}, {self.state.value})"

    def describe(self) -> str:
        return f"lsp={self.lsp_id} {self.state.value}"

    @property
    def is_primary(self) -> bool:
        return self.kind is LspKind.PRIMARY

    @property
    def is_up(self) -> bool:
        return self.state is LspState.UP

    @property
    def head(self) -> int:
        return self.explicit_route[0]

    @property
    def tail(self) -> int:
        return self.explicit_route[-1]

    def position(self, node: int) -> int:
        return self.explicit_route.index(node)

    def next_hop(self, node: int) -> int | None:
        index = self.position(node)
        return self.explicit_route[index + 1] if index + 1 < len(self.explicit_route) else None

    def previous_hop(self, node: int) -> int | None:
        index = self.position(node)
        return self.explicit_route[index - 1] if index > 0 else None

    def hops(self) -> list[tuple[int, int]]:
        route = self.explicit_route
        return list(zip(route, route[1:]))

    def stalest_refresh(self) -> float | None:
        return min(self.last_refresh_at.values()) if self.last_refresh_at else None
