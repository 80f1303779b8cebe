"""
Seed plumbing: one base seed fans out into named sub-streams, and per-frame generators
are derived from (base seed, frame index) so results do not depend on work chunking.
"""
from typing import Optional

import numpy as np

from src.exceptions import ConfigError

STREAMS = {
    "hardware-noise": 0,
    "shuffle": 1,
    "calibration-noise": 2,
    "activation-noise": 3,
    "init": 4,
    "subset": 5,
    "workload": 6,
}


def substream_seed(seed: int, name: str) -> int:
    """Integer seed of a named sub-stream."""
    if name not in STREAMS:
        raise ConfigError(f"Unknown random stream '{name}', expected one of {sorted(STREAMS)}")
    sequence = np.random.SeedSequence(seed, spawn_key=(STREAMS[name],))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def substream(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng(substream_seed(seed, name))


def frame_rng(seed: Optional[int], *index: int) -> np.random.Generator:
    """Generator for one frame (or image) of a batch run, keyed by e.g. (epoch, image)."""
    if seed is None:
        return np.random.default_rng()
    return np.random.default_rng(np.random.SeedSequence([int(seed), *(int(i) for i in index)]))
