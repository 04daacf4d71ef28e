"""
Random number streams and variate generators.

Every stream is derived from one root seed and a stream id through numpy's
SeedSequence (its spawn key hashing is the 64-bit mixing step), feeding a
PCG64 bit generator. Variates are drawn by inverse transform on the
stream's uniform output, so a (seed, stream_id) pair always yields the same
sequence regardless of how other streams are consumed.
"""

from __future__ import annotations

import math

import numpy as np

from lspsim.errors import VariateError

SEED_LIMIT = 2**64


class RngStream:
    def __init__(self, seed: int, stream_id: int):
        if not 0 <= seed < SEED_LIMIT:
            raise VariateError(f"seed must be a 64-bit unsigned integer, got {seed}")
        if stream_id < 0:
            raise VariateError(f"stream id must be non-negative, got {stream_id}")
        self.seed = seed
        self.stream_id = stream_id
        sequence = np.random.SeedSequence(seed, spawn_key=(stream_id,))
        self._generator = np.random.Generator(np.random.PCG64(sequence))

    def uniform(self) -> float:
        """One draw in [0, 1)."""
        return float(self._generator.random())

    def uniforms(self, n: int) -> np.ndarray:
        """``n`` draws in [0, 1), the same values ``n`` calls to uniform() return."""
        return self._generator.random(n)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


class Exponential:
    def __init__(self, stream: RngStream, mean: float):
        if not (mean > 0 and math.isfinite(mean)):
            raise VariateError(f"exponential mean must be positive, got {mean}")
        self.stream = stream
        self.mean = mean

    def sample(self) -> float:
        return -self.mean * math.log1p(-self.stream.uniform())

    def samples(self, n: int) -> np.ndarray:
        return -self.mean * np.log1p(-self.stream.uniforms(n))


class Uniform:
    def __init__(self, stream: RngStream, a: float, b: float):
        if not a < b:
            raise VariateError(f"uniform bounds need a < b, got [{a}, {b})")
        self.stream = stream
        self.a = a
        self.b = b

    def sample(self) -> float:
        return self.a + (self.b - self.a) * self.stream.uniform()

    def samples(self, n: int) -> np.ndarray:
        return self.a + (self.b - self.a) * self.stream.uniforms(n)


class Pareto:
    def __init__(self, stream: RngStream, shape: float, scale: float):
        # shape > 1 so the mean exists
        if not shape > 1:
            raise VariateError(f"pareto shape must exceed 1, got {shape}")
        if not scale > 0:
            raise VariateError(f"pareto scale must be positive, got {scale}")
        self.stream = stream
        self.shape = shape
        self.scale = scale

    @property
    def mean(self) -> float:
        return self.shape * self.scale / (self.shape - 1)

    def sample(self) -> float:
        return self.scale * (1.0 - self.stream.uniform()) ** (-1.0 / self.shape)

    def samples(self, n: int) -> np.ndarray:
        return self.scale * np.power(1.0 - self.stream.uniforms(n), -1.0 / self.shape)


def rng_exponential(stream: RngStream, mean: float) -> float:
    return Exponential(stream, mean).sample()


def rng_uniform(stream: RngStream, a: float, b: float) -> float:
    return Uniform(stream, a, b).sample()


def rng_pareto(stream: RngStream, shape: float, scale: float) -> float:
    return Pareto(stream, shape, scale).sample()
