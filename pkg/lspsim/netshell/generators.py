"""
Traffic generators.

A generator is a small state machine driven by the shell: ``start(now)``
returns the delay to the first emission and ``emit(now)`` is called after
every emitted packet and returns the delay to the next one, or None once
the generator has stopped. An EXP_ON_OFF generator turns OFF when its
burst ends and the shell calls ``resume()`` when the next one begins.
"""

from __future__ import annotations

import logging
from enum import Enum

from lspsim.errors import VariateError
from lspsim.kernel import Exponential, Pareto, RngStream

logger = logging.getLogger(__name__)

# Per-generator stream ids are GENERATOR_STREAM_BASE + 4 * id + offset
GENERATOR_STREAM_BASE = 1000
INTERVAL_STREAM = 0
ON_STREAM = 1
OFF_STREAM = 2


class GeneratorKind(Enum):
    CBR = "CBR"
    EXPONENTIAL = "EXPONENTIAL"
    EXP_ON_OFF = "EXP_ON_OFF"
    PARETO = "PARETO"


class GeneratorState(Enum):
    OFF = "OFF"
    ON = "ON"
    STOPPED = "STOPPED"


def generator_stream_id(generator_id: int, offset: int) -> int:
    return GENERATOR_STREAM_BASE + 4 * generator_id + offset


def pareto_scale_for(interval: float, shape: float) -> float:
    """Scale that gives a Pareto distribution of the given mean."""
    return interval * (shape - 1) / shape


class TrafficGenerator:
    def __init__(
        self,
        generator_id: int,
        kind: GeneratorKind,
        node: int,
        dst_node: int,
        packet_size: int,
        rate: float,
        streams: dict[int, RngStream],
        *,
        on_mean: float | None = None,
        off_mean: float | None = None,
        pareto_shape: float | None = None,
        pareto_scale: float | None = None,
        start_time: float = 0.0,
    ):
        if packet_size <= 0:
            raise VariateError(f"generator {generator_id}: packet size must be positive")
        if rate <= 0:
            raise VariateError(f"generator {generator_id}: rate must be positive")
        self.id = generator_id
        self.kind = kind
        self.node = node
        self.dst_node = dst_node
        self.packet_size = packet_size
        self.rate = rate
        self.start_time = start_time
        self.on_mean = on_mean
        self.off_mean = off_mean
        self.pareto_shape = pareto_shape
        self.pareto_scale = pareto_scale
        self.state = GeneratorState.OFF
        self.emitted = 0

        self.on_end: float | None = None
        self.on_time_total = 0.0
        self.off_time_total = 0.0
        self.cycles = 0

        self._interval_draw = None
        self._on_draw = None
        self._off_draw = None
        if kind is GeneratorKind.EXPONENTIAL:
            self._interval_draw = Exponential(streams[INTERVAL_STREAM], self.interval)
        elif kind is GeneratorKind.PARETO:
            if pareto_shape is None:
                raise VariateError(f"generator {generator_id}: PARETO needs a shape")
            if self.pareto_scale is None:
                self.pareto_scale = pareto_scale_for(self.interval, pareto_shape)
            self._interval_draw = Pareto(streams[INTERVAL_STREAM], pareto_shape, self.pareto_scale)
        elif kind is GeneratorKind.EXP_ON_OFF:
            if on_mean is None or off_mean is None:
                raise VariateError(f"generator {generator_id}: EXP_ON_OFF needs on and off means")
            self._on_draw = Exponential(streams[ON_STREAM], on_mean)
            self._off_draw = Exponential(streams[OFF_STREAM], off_mean)

    def __repr__(self):
        return f"TrafficGenerator({self.id}, {self.kind.value}, {self.node}->{self.dst_node})"

    def describe(self) -> str:
        return f"gen={self.id} node={self.node}"

    @property
    def interval(self) -> float:
        """Emission interval at the configured rate."""
        return self.packet_size * 8 / self.rate

    @property
    def on_fraction(self) -> float:
        total = self.on_time_total + self.off_time_total
        return self.on_time_total / total if total > 0 else 0.0

    def start(self, now: float) -> float:
        self.state = GeneratorState.ON
        if self.kind is GeneratorKind.EXP_ON_OFF:
            on_duration = self._on_draw.sample()
            self.on_time_total += on_duration
            self.on_end = now + on_duration
        return 0.0

    def stop(self) -> None:
        self.state = GeneratorState.STOPPED

    def resume(self) -> None:
        """Open the next ON period once the OFF period before it has run out."""
        if self.state is GeneratorState.OFF:
            self.state = GeneratorState.ON

    def emit(self, now: float) -> float | None:
        if self.state is GeneratorState.STOPPED:
            return None
        self.emitted += 1
        if self.kind is GeneratorKind.CBR:
            return self.interval
        if self.kind is not GeneratorKind.EXP_ON_OFF:
            return self._interval_draw.sample()
        return self._next_on_off(now)

    def _next_on_off(self, now: float) -> float:
        # constant rate inside a burst
        if now + self.interval < self.on_end:
            return self.interval
        # the burst ends: an OFF period, then the next ON period opens with an emission
        off_duration = self._off_draw.sample()
        on_duration = self._on_draw.sample()
        self.off_time_total += off_duration
        self.on_time_total += on_duration
        self.cycles += 1
        self.state = GeneratorState.OFF
        next_start = self.on_end + off_duration
        self.on_end = next_start + on_duration
        return next_start - now
