"""Counter-based random streams.

Every uniform variate is a pure function of ``(seed, trial, draw)``: the
trial key is a SplitMix64 hash of the seed and trial index, and the trial's
stream is the SplitMix64 sequence started from that key. Vectorized and
scalar evaluation produce bit-identical variates, so results do not depend on
how trials are split across workers.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_TRIAL_STRIDE = 0xD1B54A32D192ED03

# uniform = (2 * (h >> 12) + 1) * 2**-53, strictly inside (0, 1)
_SCALE = 2.0**-53


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def mix64_array(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64, copy=True)
    z ^= z >> np.uint64(30)
    z *= np.uint64(_M1)
    z ^= z >> np.uint64(27)
    z *= np.uint64(_M2)
    z ^= z >> np.uint64(31)
    return z


def _seed_key(seed: int) -> int:
    return mix64((seed & MASK64) + GOLDEN)


def trial_key(seed: int, trial_index: int) -> int:
    return mix64(_seed_key(seed) ^ ((trial_index * _TRIAL_STRIDE) & MASK64))


def trial_keys(seed: int, trial_indices: np.ndarray) -> np.ndarray:
    idx = np.asarray(trial_indices, dtype=np.uint64)
    return mix64_array(np.uint64(_seed_key(seed)) ^ (idx * np.uint64(_TRIAL_STRIDE)))


def _to_unit(h):
    return (2.0 * (h >> 12) + 1.0) * _SCALE


def uniforms(keys: np.ndarray, draw_indices: np.ndarray) -> np.ndarray:
    """Uniform variates for each ``(key, draw)`` pair (arrays broadcast)."""
    keys = np.asarray(keys, dtype=np.uint64)
    draws = np.asarray(draw_indices, dtype=np.uint64)
    h = mix64_array(keys + (draws + np.uint64(1)) * np.uint64(GOLDEN))
    return ((h >> np.uint64(12)).astype(np.float64) * 2.0 + 1.0) * _SCALE


class TrialStream:
    """Sequential view of one trial's counter-based stream."""

    __slots__ = ("seed", "trial_index", "key", "position")

    def __init__(self, seed: int, trial_index: int, position: int = 0):
        self.seed = seed
        self.trial_index = trial_index
        self.key = trial_key(seed, trial_index)
        self.position = position

    def uniform_at(self, draw: int) -> float:
        h = mix64(self.key + ((draw + 1) * GOLDEN & MASK64))
        return float(_to_unit(h))

    def uniform(self) -> float:
        u = self.uniform_at(self.position)
        self.position += 1
        return u

    def __repr__(self) -> str:
        return f"TrialStream(seed={self.seed}, trial_index={self.trial_index}, position={self.position})"


def derive_trial_rng(seed: int, trial_index: int) -> TrialStream:
    if trial_index < 0:
        raise ValueError("trial_index must be non-negative")
    return TrialStream(seed, trial_index)
