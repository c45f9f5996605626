"""Deterministic per-trial random streams.

Streams use numpy's counter-based Philox (4x64, 10 rounds) bit generator. The
64-bit experiment seed is the Philox key and the 256-bit counter is offset by
block: counter word 3 carries the trial id and word 2 a small lane index (for
runs that interleave two protocols). Distinct (lane, trial) pairs are at least
2**128 draws apart, so streams never overlap and any trial can be regenerated
in isolation from (seed, trial_id, lane).
"""
from __future__ import annotations

import numpy as np

RNG_ALGORITHM = "numpy.random.Philox(4x64-10); key=seed, counter=[0,0,lane,trial_id]"


def trial_stream(seed: int, trial_id: int, lane: int = 0) -> np.random.Generator:
    """Independent Generator for one trial of one protocol lane."""
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be a u64, got {seed}")
    if trial_id < 0 or lane < 0:
        raise ValueError("trial_id and lane must be >= 0")
    bg = np.random.Philox(key=seed, counter=[0, 0, int(lane), int(trial_id)])
    return np.random.Generator(bg)
