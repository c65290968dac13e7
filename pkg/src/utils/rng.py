"""
Seeded random streams.

A stream is identified by (seed, stream_id) plus an optional path of child
indices. The triple feeds a numpy SeedSequence, so the same identity draws the
same numbers on every platform, and child streams for parallel trials are
independent of one another and of the order in which they are used.
"""

import numpy as np


class RngStream:
    """
    Single-owner wrapper around a PCG64 generator.

    Args:
        seed: Non-negative 64-bit seed.
        stream_id: Non-negative 64-bit stream identifier.
        path: Child indices leading to this stream.
    """

    def __init__(self, seed: int, stream_id: int = 0, path: tuple[int, ...] = ()):
        if seed < 0 or seed >= 2 ** 64:
            raise ValueError(f"seed must be a 64-bit non-negative integer, got {seed}")
        if stream_id < 0 or stream_id >= 2 ** 64:
            raise ValueError(f"stream_id must be a 64-bit non-negative integer, got {stream_id}")

        self._seed = int(seed)
        self._stream_id = int(stream_id)
        self._path = tuple(int(p) for p in path)
        sequence = np.random.SeedSequence(
            entropy=self._seed,
            spawn_key=(self._stream_id, *self._path)
        )
        self._generator = np.random.Generator(np.random.PCG64(sequence))

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def stream_id(self) -> int:
        return self._stream_id

    @property
    def path(self) -> tuple[int, ...]:
        return self._path

    @property
    def generator(self) -> np.random.Generator:
        """Underlying numpy generator (for distribution draws)."""
        return self._generator

    def child(self, index: int) -> 'RngStream':
        """Derive an independent stream for repetition or trial `index`."""
        return RngStream(self._seed, self._stream_id, self._path + (index,))

    def integers(self, high: int, size: int) -> np.ndarray:
        """Draw `size` indices i.i.d. uniform over [0, high)."""
        return self._generator.integers(0, high, size=size, dtype=np.int64)

    def index(self, high: int) -> int:
        """Draw a single index uniform over [0, high)."""
        return int(self._generator.integers(0, high))

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None):
        return self._generator.uniform(low, high, size=size)

    def normal(self, size=None, scale: float = 1.0):
        return self._generator.normal(0.0, scale, size=size)

    def __repr__(self) -> str:
        return f"RngStream(seed={self._seed}, stream_id={self._stream_id}, path={self._path})"
