"""
Validated scenario configuration.
"""

from __future__ import annotations

from typing import Literal

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeFloat,
    PositiveFloat,
    PositiveInt,
    model_validator,
)

from lspsim.conf import settings
from lspsim.mplsctl import Timers
from lspsim.netshell import GeneratorKind

SEED_LIMIT = 2**64


class _Item(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class LinkConfig(_Item):
    a: PositiveInt
    b: PositiveInt
    bandwidth: PositiveFloat
    prop_delay: NonNegativeFloat

    @model_validator(mode="after")
    def distinct_endpoints(self):
        if self.a == self.b:
            raise ValueError(f"link endpoints must differ, got {self.a}-{self.b}")
        return self


class RouteConfig(_Item):
    node: PositiveInt
    dst: PositiveInt
    next_hop: PositiveInt


class GeneratorConfig(_Item):
    id: PositiveInt
    kind: GeneratorKind
    node: PositiveInt
    dst: PositiveInt
    size: PositiveInt
    rate: PositiveFloat
    on_mean: PositiveFloat | None = None
    off_mean: PositiveFloat | None = None
    start: NonNegativeFloat = 0.0
    shape: float | None = None
    scale: PositiveFloat | None = None

    @model_validator(mode="after")
    def kind_parameters(self):
        if self.node == self.dst:
            raise ValueError(f"generator {self.id} sends to its own node")
        if self.kind is GeneratorKind.EXP_ON_OFF and (self.on_mean is None or self.off_mean is None):
            raise ValueError(f"generator {self.id}: EXP_ON_OFF needs on_mean and off_mean")
        if self.kind is GeneratorKind.PARETO and (self.shape is None or not self.shape > 1):
            raise ValueError(f"generator {self.id}: PARETO needs shape= greater than 1")
        return self


class LspConfig(_Item):
    id: PositiveInt
    ingress: PositiveInt
    egress: PositiveInt
    bandwidth: NonNegativeFloat = 0.0
    route: tuple[PositiveInt, ...] = Field(min_length=2)
    optional: bool = False

    @model_validator(mode="after")
    def route_endpoints(self):
        if self.route[0] != self.ingress:
            raise ValueError(f"LSP {self.id}: route does not start at ingress {self.ingress}")
        if self.route[-1] != self.egress:
            raise ValueError(f"LSP {self.id}: route does not end at egress {self.egress}")
        if len(set(self.route)) != len(self.route):
            raise ValueError(f"LSP {self.id}: route visits a node twice")
        return self


class BackupConfig(_Item):
    id: PositiveInt
    protects: PositiveInt
    merge_start: PositiveInt
    merge_end: PositiveInt
    route: tuple[PositiveInt, ...] = Field(min_length=2)

    @model_validator(mode="after")
    def route_endpoints(self):
        if self.route[0] != self.merge_start:
            raise ValueError(f"backup {self.id}: route does not start at merge start {self.merge_start}")
        if self.route[-1] != self.merge_end:
            raise ValueError(f"backup {self.id}: route does not end at merge end {self.merge_end}")
        if len(set(self.route)) != len(self.route):
            raise ValueError(f"backup {self.id}: route visits a node twice")
        return self


class FailureConfig(_Item):
    a: PositiveInt
    b: PositiveInt
    fail_at: NonNegativeFloat
    restore_at: NonNegativeFloat | None = None

    @model_validator(mode="after")
    def restore_after_failure(self):
        if self.restore_at is not None and not self.restore_at > self.fail_at:
            raise ValueError(f"link {self.a}-{self.b} is restored before it fails")
        return self


class PolicerConfig(_Item):
    target: Literal["generator", "lsp"]
    id: PositiveInt
    rate: PositiveFloat
    bucket: PositiveFloat


class ScenarioConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    sim_end: PositiveFloat
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED, ge=0, lt=SEED_LIMIT)
    control_channel: Literal["shared", "dedicated"] = "shared"
    nodes: PositiveInt
    links: list[LinkConfig] = Field(default_factory=list)
    routes: list[RouteConfig] = Field(default_factory=list)
    generators: list[GeneratorConfig] = Field(default_factory=list)
    lsps: list[LspConfig] = Field(default_factory=list)
    backups: list[BackupConfig] = Field(default_factory=list)
    failures: list[FailureConfig] = Field(default_factory=list)
    policers: list[PolicerConfig] = Field(default_factory=list)
    timers: Timers = Field(default_factory=Timers)

    @model_validator(mode="after")
    def references_resolve(self):
        errors = reference_errors(self)
        if errors:
            raise ValueError("; ".join(message for _, _, message in errors))
        return self

    def with_overrides(self, *, seed: int | None = None, sim_end: float | None = None) -> ScenarioConfig:
        """A validated copy with the run seed or end time replaced."""
        data = self.model_dump()
        if seed is not None:
            data["seed"] = seed
        if sim_end is not None:
            data["sim_end"] = sim_end
        return ScenarioConfig.model_validate(data)


def reference_errors(config) -> list[tuple[str, int, str]]:
    """
    Cross-reference problems as (section, item index, message).

    ``config`` is anything with ScenarioConfig's attributes, so the parser
    can check its items before building the model.
    """
    errors: list[tuple[str, int, str]] = []
    node_ids = range(1, config.nodes + 1)

    def unknown_nodes(section, index, *nodes):
        for node in nodes:
            if node not in node_ids:
                errors.append((section, index, f"unknown node {node}"))

    adjacency: set[tuple[int, int]] = set()
    for index, link in enumerate(config.links):
        unknown_nodes("links", index, link.a, link.b)
        if (link.a, link.b) in adjacency:
            errors.append(("links", index, f"duplicate link {link.a}-{link.b}"))
        adjacency.update({(link.a, link.b), (link.b, link.a)})

    def check_route(section, index, route):
        unknown_nodes(section, index, *route)
        for a, b in zip(route, route[1:]):
            if (a, b) not in adjacency:
                errors.append((section, index, f"route uses missing link {a}-{b}"))

    for index, route in enumerate(config.routes):
        unknown_nodes("routes", index, route.node, route.dst, route.next_hop)
        if (route.node, route.next_hop) not in adjacency:
            errors.append(("routes", index, f"{route.next_hop} is not a neighbor of {route.node}"))

    generator_ids = set()
    for index, generator in enumerate(config.generators):
        unknown_nodes("generators", index, generator.node, generator.dst)
        if generator.id in generator_ids:
            errors.append(("generators", index, f"duplicate generator {generator.id}"))
        generator_ids.add(generator.id)

    lsp_routes: dict[int, tuple[int, ...]] = {}
    for index, lsp in enumerate(config.lsps):
        if lsp.id in lsp_routes:
            errors.append(("lsps", index, f"duplicate LSP id {lsp.id}"))
        lsp_routes[lsp.id] = lsp.route
        check_route("lsps", index, lsp.route)

    backup_ids = set()
    for index, backup in enumerate(config.backups):
        if backup.id in lsp_routes or backup.id in backup_ids:
            errors.append(("backups", index, f"duplicate LSP id {backup.id}"))
        backup_ids.add(backup.id)
        check_route("backups", index, backup.route)
        protected = lsp_routes.get(backup.protects)
        if protected is None:
            errors.append(("backups", index, f"protects unknown LSP {backup.protects}"))
            continue
        if backup.merge_start not in protected or backup.merge_end not in protected:
            errors.append(("backups", index, f"merge points are not on the route of LSP {backup.protects}"))
        elif protected.index(backup.merge_start) >= protected.index(backup.merge_end):
            errors.append(("backups", index, "merge start must precede merge end"))

    for index, failure in enumerate(config.failures):
        if (failure.a, failure.b) not in adjacency:
            errors.append(("failures", index, f"unknown link {failure.a}-{failure.b}"))

    for index, policer in enumerate(config.policers):
        targets = generator_ids if policer.target == "generator" else set(lsp_routes)
        if policer.id not in targets:
            errors.append(("policers", index, f"unknown {policer.target} {policer.id}"))

    return errors
