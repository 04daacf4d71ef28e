"""
Scenario file reader and writer.

The format is line oriented: ``[section]`` headers, whitespace separated
fields, ``#`` comments. Every error is reported with its line number.
"""

from __future__ import annotations

from pathlib import Path
from types import SimpleNamespace

from pydantic import ValidationError

from lspsim.errors import ConfigError, LineError
from lspsim.mplsctl import Timers

from .config import (
    BackupConfig,
    FailureConfig,
    GeneratorConfig,
    LinkConfig,
    LspConfig,
    PolicerConfig,
    RouteConfig,
    ScenarioConfig,
    reference_errors,
)

ITEM_SECTIONS = ("links", "routes", "generators", "lsps", "backups", "failures", "policers")
SECTIONS = ("sim", "nodes", "timers", *ITEM_SECTIONS)
SIM_KEYS = {"end": "sim_end", "seed": "seed", "control_channel": "control_channel"}
SIM_KEY_NAMES = {field: key for key, field in SIM_KEYS.items()}
GENERATOR_EXTRAS = ("shape", "scale")
UNSET = "-"


class _RowError(ValueError):
    pass


def _expect(fields: list[str], count: int, layout: str) -> None:
    if len(fields) != count:
        raise _RowError(f"expected {count} fields ({layout}), got {len(fields)}")


def _optional(token: str) -> str | None:
    return None if token == UNSET else token


def _link_row(fields):
    _expect(fields, 4, "a b bandwidth_bps prop_delay_s")
    a, b, bandwidth, prop_delay = fields
    return LinkConfig(a=a, b=b, bandwidth=bandwidth, prop_delay=prop_delay)


def _route_row(fields):
    _expect(fields, 3, "node dst next_hop")
    node, dst, next_hop = fields
    return RouteConfig(node=node, dst=dst, next_hop=next_hop)


def _generator_row(fields):
    positional = [field for field in fields if "=" not in field]
    extras = {}
    for field in fields:
        if "=" in field:
            key, _, value = field.partition("=")
            if key not in GENERATOR_EXTRAS:
                raise _RowError(f"unknown generator option {key!r}")
            extras[key] = value
    _expect(positional, 9, "id kind node dst size_bytes rate_bps on_mean off_mean start")
    generator_id, kind, node, dst, size, rate, on_mean, off_mean, start = positional
    return GeneratorConfig(
        id=generator_id,
        kind=kind.upper(),
        node=node,
        dst=dst,
        size=size,
        rate=rate,
        on_mean=_optional(on_mean),
        off_mean=_optional(off_mean),
        start=start,
        **extras,
    )


def _lsp_row(fields):
    optional = bool(fields) and fields[-1].lower() == "optional"
    if optional:
        fields = fields[:-1]
    if len(fields) < 6:
        raise _RowError("expected id ingress egress bw route... with at least two route nodes")
    lsp_id, ingress, egress, bandwidth, *route = fields
    return LspConfig(id=lsp_id, ingress=ingress, egress=egress, bandwidth=bandwidth, route=route, optional=optional)


def _backup_row(fields):
    if len(fields) < 6:
        raise _RowError("expected id protects merge_start merge_end route... with at least two route nodes")
    backup_id, protects, merge_start, merge_end, *route = fields
    return BackupConfig(id=backup_id, protects=protects, merge_start=merge_start, merge_end=merge_end, route=route)


def _failure_row(fields):
    if len(fields) not in (3, 4):
        raise _RowError("expected a b fail_at [restore_at]")
    a, b, fail_at, *rest = fields
    restore_at = _optional(rest[0]) if rest else None
    return FailureConfig(a=a, b=b, fail_at=fail_at, restore_at=restore_at)


def _policer_row(fields):
    _expect(fields, 4, "target id rate_bps bucket_bytes")
    target, target_id, rate, bucket = fields
    return PolicerConfig(target=target.lower(), id=target_id, rate=rate, bucket=bucket)


ROW_PARSERS = {
    "links": _link_row,
    "routes": _route_row,
    "generators": _generator_row,
    "lsps": _lsp_row,
    "backups": _backup_row,
    "failures": _failure_row,
    "policers": _policer_row,
}


def _describe(exc: ValidationError) -> str:
    messages = []
    for error in exc.errors():
        message = error["msg"].removeprefix("Value error, ")
        location = ".".join(str(part) for part in error["loc"])
        messages.append(f"{location}: {message}" if location else message)
    return "; ".join(messages)


def parse_scenario(text: str) -> ScenarioConfig:
    errors: list[LineError] = []
    sim: dict[str, str] = {}
    sim_lines: dict[str, int] = {}
    nodes: str | None = None
    nodes_line = 0
    timers: dict[str, str] = {}
    timer_lines: dict[str, int] = {}
    items: dict[str, list] = {section: [] for section in ITEM_SECTIONS}
    item_lines: dict[str, list[int]] = {section: [] for section in ITEM_SECTIONS}
    section = None

    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            name = line.strip("[]").strip().lower()
            if not line.endswith("]") or name not in SECTIONS:
                errors.append(LineError(number, f"unknown section {line}"))
                section = None
                continue
            section = name
            continue
        if section is None:
            errors.append(LineError(number, "line is outside any section"))
            continue

        fields = line.split()
        if section in ("sim", "timers"):
            if len(fields) != 2:
                errors.append(LineError(number, "expected 'key value'"))
                continue
            key, value = fields
            if section == "sim":
                if key not in SIM_KEYS:
                    errors.append(LineError(number, f"unknown [sim] key {key!r}"))
                    continue
                sim[SIM_KEYS[key]] = value
                sim_lines[SIM_KEYS[key]] = number
            else:
                if key not in Timers.model_fields:
                    errors.append(LineError(number, f"unknown timer {key!r}"))
                    continue
                timers[key] = value
                timer_lines[key] = number
            continue
        if section == "nodes":
            if nodes is not None or len(fields) != 1:
                errors.append(LineError(number, "[nodes] takes a single node count"))
                continue
            nodes, nodes_line = fields[0], number
            continue

        try:
            item = ROW_PARSERS[section](fields)
        except _RowError as exc:
            errors.append(LineError(number, str(exc)))
            continue
        except ValidationError as exc:
            errors.append(LineError(number, _describe(exc)))
            continue
        items[section].append(item)
        item_lines[section].append(number)

    if nodes is None:
        errors.insert(0, LineError(0, "no nodes"))
    if "sim_end" not in sim:
        errors.append(LineError(0, "missing [sim] end"))

    timer_model = None
    try:
        timer_model = Timers(**timers)
    except ValidationError as exc:
        for error in exc.errors():
            key = error["loc"][0] if error["loc"] else None
            line = timer_lines.get(key, min(timer_lines.values(), default=0))
            errors.append(LineError(line, f"timer {key}: {error['msg']}" if key else error["msg"].removeprefix("Value error, ")))

    node_count = None
    if nodes is not None:
        try:
            node_count = int(nodes)
        except ValueError:
            errors.append(LineError(nodes_line, f"node count must be an integer, got {nodes!r}"))
        else:
            if node_count < 1:
                errors.append(LineError(nodes_line, "no nodes"))
                node_count = None

    if node_count is not None:
        draft = SimpleNamespace(nodes=node_count, **items)
        for section_name, index, message in reference_errors(draft):
            errors.append(LineError(item_lines[section_name][index], message))

    if errors:
        raise ConfigError(errors)

    try:
        return ScenarioConfig(nodes=node_count, timers=timer_model, **sim, **items)
    except ValidationError as exc:
        line_errors = []
        for error in exc.errors():
            key = error["loc"][0] if error["loc"] else None
            line = sim_lines.get(key, 0)
            line_errors.append(LineError(line, f"{SIM_KEY_NAMES.get(key, key)}: {error['msg']}"))
        raise ConfigError(line_errors) from None


def load_scenario(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return parse_scenario(text)


def _number(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def _maybe(value) -> str:
    return UNSET if value is None else _number(value)


def dump_scenario(config: ScenarioConfig) -> str:
    """Canonical text for a config; parse_scenario reads it back to an equal config."""
    lines = [
        "[sim]",
        f"end {_number(config.sim_end)}",
        f"seed {config.seed}",
        f"control_channel {config.control_channel}",
        "",
        "[nodes]",
        str(config.nodes),
    ]

    def section(name, rows):
        if rows:
            lines.extend(["", f"[{name}]", *rows])

    section("links", [f"{link.a} {link.b} {_number(link.bandwidth)} {_number(link.prop_delay)}" for link in config.links])
    section("routes", [f"{r.node} {r.dst} {r.next_hop}" for r in config.routes])

    generator_rows = []
    for g in config.generators:
        row = (
            f"{g.id} {g.kind.value} {g.node} {g.dst} {g.size} {_number(g.rate)} "
            f"{_maybe(g.on_mean)} {_maybe(g.off_mean)} {_number(g.start)}"
        )
        for key in GENERATOR_EXTRAS:
            value = getattr(g, key)
            if value is not None:
                row += f" {key}={_number(value)}"
        generator_rows.append(row)
    section("generators", generator_rows)

    section(
        "lsps",
        [
            f"{lsp.id} {lsp.ingress} {lsp.egress} {_number(lsp.bandwidth)} {' '.join(map(str, lsp.route))}"
            + (" optional" if lsp.optional else "")
            for lsp in config.lsps
        ],
    )
    section(
        "backups",
        [
            f"{b.id} {b.protects} {b.merge_start} {b.merge_end} {' '.join(map(str, b.route))}"
            for b in config.backups
        ],
    )
    section(
        "failures",
        [f"{f.a} {f.b} {_number(f.fail_at)} {_maybe(f.restore_at)}" for f in config.failures],
    )
    section(
        "timers",
        [f"{key} {_number(value)}" for key, value in config.timers.model_dump(exclude_defaults=True).items()],
    )
    section(
        "policers",
        [f"{p.target} {p.id} {_number(p.rate)} {_number(p.bucket)}" for p in config.policers],
    )
    return "\n".join(lines) + "\n"
