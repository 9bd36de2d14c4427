"""Reproducible random streams keyed by ``(seed, stream_id)``."""
from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RngStream:
    """Identifies one independent random stream.

    The same ``(seed, stream_id)`` pair always yields the same draws, on any
    platform, because the generator is PCG64 seeded through ``SeedSequence``.
    """

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed & (2**64 - 1),
                                    spawn_key=(self.stream_id & (2**64 - 1),))
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, *keys) -> "RngStream":
        return RngStream(self.seed, derive_stream_id(self.stream_id, *keys))


def derive_stream_id(*keys) -> int:
    """Stable 64-bit id from a tuple of ints/strings (no use of ``hash``)."""
    ss = np.random.SeedSequence([_as_int(k) for k in keys])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _as_int(key) -> int:
    if isinstance(key, str):
        return zlib.crc32(key.encode("utf-8"))
    return int(key) & (2**64 - 1)


def as_generator(rng) -> np.random.Generator:
    """Accept an ``RngStream``, a ``Generator`` or an int seed."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    return RngStream(int(rng)).generator()
