import numpy as np

from hotstove.rng import derive_trial_rng, trial_keys, uniforms


def _draws(seed, i, n=50):
    s = derive_trial_rng(seed, i)
    return [s.uniform() for _ in range(n)]


def test_same_seed_and_index_repeat():
    assert _draws(42, 3) == _draws(42, 3)


def test_different_seed_or_index_differ():
    assert _draws(42, 0) != _draws(43, 0)
    assert _draws(42, 0) != _draws(42, 1)


def test_open_unit_interval():
    u = uniforms(trial_keys(1, np.arange(1000, dtype=np.uint64))[:, None], np.arange(20, dtype=np.uint64)[None, :])
    assert u.min() > 0.0 and u.max() < 1.0


def test_scalar_matches_vectorized_bitwise():
    idx = np.array([0, 1, 17, 2**40], dtype=np.uint64)
    keys = trial_keys(99, idx)
    vec = uniforms(keys[:, None], np.arange(8, dtype=np.uint64)[None, :])
    for row, i in zip(vec, idx):
        assert list(row) == _draws(99, int(i), 8)


def test_adjacent_streams_uncorrelated():
    # paired draws from trials 0 and 1: |corr| within 4/sqrt(N) of 0
    n = 100_000
    draws = np.arange(n, dtype=np.uint64)
    a = uniforms(trial_keys(2024, np.array([0], dtype=np.uint64)), draws)
    b = uniforms(trial_keys(2024, np.array([1], dtype=np.uint64)), draws)
    r = np.corrcoef(a, b)[0, 1]
    assert abs(r) < 4 / np.sqrt(n)


def test_uniform_moments():
    n = 200_000
    u = uniforms(trial_keys(5, np.arange(n, dtype=np.uint64)), 0)
    assert abs(u.mean() - 0.5) < 4 * np.sqrt(1 / 12 / n)
    assert abs(u.var() - 1 / 12) < 1e-3
