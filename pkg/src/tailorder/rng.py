"""Seeded, stream-indexed random number generation."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream identified by (seed, stream index).

    Distinct stream indices under one seed give statistically independent
    generators (numpy ``SeedSequence`` spawn keys), so Monte Carlo work can
    be split across streams without shared state.
    """

    seed: int
    stream: int = 0

    def generator(self):
        ss = np.random.SeedSequence(int(self.seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=(int(self.stream),))
        return np.random.Generator(np.random.PCG64(ss))

    def child(self, index):
        """A different stream under the same seed."""
        return RngStream(self.seed, self.stream * 1_000_003 + int(index) + 1)


def as_generator(rng):
    """Accept an ``RngStream``, a numpy ``Generator`` or an int seed."""
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, (int, np.integer)):
        return RngStream(int(rng)).generator()
    raise TypeError(f"cannot build a random generator from {type(rng).__name__}")
