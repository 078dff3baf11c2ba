"""Deterministic seed derivation and per-vertex noise streams.

All randomness in the package flows through two primitives:

* ``mix64`` -- a fixed 64-bit mixing function (splitmix64 finalizer chain).
  Run ``r`` of an ensemble uses ``mix64(master_seed, r)``, so ensembles can
  be extended without re-running earlier members.
* ``stream_generator`` -- a counter-based (Philox) generator keyed by
  ``(seed, stream)``.  Simulations give vertex ``i`` the stream id ``i``,
  which makes each vertex's noise sequence independent of the population
  size, the iteration order and any internal buffering.
"""
from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    # splitmix64 finalizer; bijective on 64-bit integers.
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def mix64(seed: int, *parts: int) -> int:
    """Mix ``seed`` with any number of integer ``parts`` into a 64-bit seed."""
    h = _splitmix64(seed & _MASK64)
    for p in parts:
        h = _splitmix64(h ^ (p & _MASK64))
    return h


def stream_generator(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator for substream ``stream`` of ``seed``."""
    key = np.array([mix64(seed, stream), stream & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


class VertexStreams:
    """One noise stream per vertex, served in row blocks.

    ``normal_block(k)`` returns the next ``k`` standard normals of every
    vertex as a ``(k, n)`` array: column ``i`` continues the sequence of
    ``stream_generator(seed, i)``.  Draws are buffered internally for speed;
    leftover buffered draws are carried over on refill, so the per-vertex
    sequences never depend on the buffer size.
    """

    def __init__(self, seed: int, n: int, buffer_rows: int | None = None):
        if n < 1:
            raise ValueError("need at least one vertex stream")
        self.seed = seed
        self.n = n
        self._gens = [stream_generator(seed, i) for i in range(n)]
        if buffer_rows is None:
            # keep the buffer cache-friendly: ~8 MB of doubles, >= 64 rows
            buffer_rows = max(64, 1_000_000 // n)
        self._rows = buffer_rows
        self._buf = np.empty((buffer_rows, n))
        self._cursor = 0
        self._filled = 0

    def normal_block(self, rows: int) -> np.ndarray:
        if rows > self._rows:
            self._rows = 2 * rows
            old = self._buf[self._cursor:self._filled]
            self._buf = np.empty((self._rows, self.n))
            self._buf[: len(old)] = old
            self._filled = len(old)
            self._cursor = 0
        if self._filled - self._cursor < rows:
            self._refill()
        out = self._buf[self._cursor:self._cursor + rows].copy()
        self._cursor += rows
        return out

    def _refill(self) -> None:
        keep = self._filled - self._cursor
        if keep:
            self._buf[:keep] = self._buf[self._cursor:self._filled]
        fresh = self._rows - keep
        for i, g in enumerate(self._gens):
            self._buf[keep:, i] = g.standard_normal(fresh)
        self._cursor = 0
        self._filled = self._rows
