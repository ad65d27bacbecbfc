"""Seeded random streams.

Every stochastic routine draws from a Philox-4x64 generator (numpy's
counter-based bit generator). A stream is identified by an integer seed
and a text label; the label is hashed with CRC-32 and mixed into the
seed sequence, so two stages sharing one user seed never share a stream
and adding a new stage does not perturb existing ones.
"""
from __future__ import annotations

import zlib

import numpy as np


def stream(seed: int, label: str) -> np.random.Generator:
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    key = zlib.crc32(label.encode("utf-8"))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, key])))


class UniformBuffer:
    """Scalar uniforms in [0, 1) drawn from a generator in fixed-size blocks.

    Tight Python loops (preferential attachment, rewiring) pay a large
    per-call overhead for ``rng.random()``; buffering keeps the stream
    identical to one long ``rng.random(N)`` call while amortising it.
    """

    def __init__(self, rng: np.random.Generator, block: int = 8192):
        self._rng = rng
        self._block = block
        self._buf = rng.random(block)
        self._i = 0

    def next(self) -> float:
        if self._i == self._block:
            self._buf = self._rng.random(self._block)
            self._i = 0
        x = self._buf[self._i]
        self._i += 1
        return float(x)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        k = int(self.next() * n)
        return k if k < n else n - 1
