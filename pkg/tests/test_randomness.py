import numba as nb
import numpy as np
import pytest
from scipy import stats

from critperc.randomness import (
    SampleKey,
    nb_sample_hash,
    nb_site_open,
    parse_seed,
    site_state,
    site_states,
)

N = 10**6


@nb.njit
def _nb_state(seed, sample, i, j):
    return nb_site_open(nb_sample_hash(seed, sample), i, j)


def test_pure():
    k = SampleKey(42, 7)
    assert site_state(k, (3, -5)) == site_state(k, (3, -5))


def test_three_implementations_agree():
    rng = np.random.default_rng(1)
    seeds = rng.integers(0, 2**63, 500, dtype=np.uint64) * np.uint64(2) + np.uint64(1)
    samples = rng.integers(0, 2**40, 500)
    ii = rng.integers(-(2**31), 2**31 - 1, 500)
    jj = rng.integers(-(2**31), 2**31 - 1, 500)
    for seed, s, i, j in zip(seeds, samples, ii, jj):
        ref = site_state(SampleKey(int(seed), int(s)), (int(i), int(j)))
        assert ref == bool(site_states(int(seed), [int(s)], [int(i)], [int(j)])[0])
        assert ref == _nb_state(seed, int(s), int(i), int(j))


def test_balance():
    rng = np.random.default_rng(2)
    samples = rng.integers(0, 2**62, N)
    ii = rng.integers(-10**6, 10**6, N)
    jj = rng.integers(-10**6, 10**6, N)
    frac = site_states(12345, samples, ii, jj).mean()
    assert abs(frac - 0.5) <= 3 * 0.5 / np.sqrt(N)


@pytest.mark.parametrize("offset", [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)])
def test_neighbor_correlation(offset):
    samples = np.arange(N)
    a = site_states(99, samples, 0, 0).astype(float)
    b = site_states(99, samples, offset[0], offset[1]).astype(float)
    rho = np.corrcoef(a, b)[0, 1]
    assert abs(rho) < 3 / np.sqrt(N)


def test_patch_patterns_chi_square():
    samples = np.arange(N)
    sites = [(0, 0), (1, 0), (0, 1), (-1, 1)]
    code = np.zeros(N, dtype=np.int64)
    for bit, (i, j) in enumerate(sites):
        code |= site_states(7, samples, i, j).astype(np.int64) << bit
    observed = np.bincount(code, minlength=16)
    assert stats.chisquare(observed).pvalue > 0.001


def test_distinct_seeds_independent():
    samples = np.arange(N)
    a = site_states(1, samples, 5, 5).astype(float)
    b = site_states(2, samples, 5, 5).astype(float)
    assert abs(np.corrcoef(a, b)[0, 1]) < 3 / np.sqrt(N)


def test_parse_seed():
    assert parse_seed("42") == 42
    assert parse_seed("0xFF") == 255
    assert parse_seed("0xffffffffffffffff") == 2**64 - 1
    with pytest.raises(ValueError):
        parse_seed(str(2**64))
