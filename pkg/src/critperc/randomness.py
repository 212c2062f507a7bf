"""Lazily evaluated site states.

Every site of every sample gets its state from a counter-based hash of
``(seed, sample, i, j)``: nothing is stored, so cluster explorations can wander
arbitrarily far without materializing a configuration.  The mixer is the
SplitMix64 finalizer; the top bit of the output decides open/closed.

The same construction exists three times: plain Python (reference),
vectorized numpy, and numba (used inside the exploration kernels).  Tests
check that all three agree bit for bit.
"""
from __future__ import annotations

from typing import NamedTuple

import numba as nb
import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MUL1 = 0xBF58476D1CE4E5B9
MUL2 = 0x94D049BB133111EB


class SampleKey(NamedTuple):
    seed: int
    sample: int


def parse_seed(text: str | int) -> int:
    """Accept a 64-bit seed as decimal or ``0x`` hexadecimal."""
    if isinstance(text, int):
        value = text
    else:
        text = text.strip().lower()
        value = int(text, 16) if text.startswith("0x") else int(text, 10)
    if not 0 <= value <= MASK64:
        raise ValueError(f"seed out of 64-bit range: {text}")
    return value


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * MUL1) & MASK64
    z = ((z ^ (z >> 27)) * MUL2) & MASK64
    return z ^ (z >> 31)


def sample_hash(seed: int, sample: int) -> int:
    return mix64(mix64(seed + GOLDEN) ^ (sample & MASK64))


def _pack(i: int, j: int) -> int:
    return ((i & 0xFFFFFFFF) << 32) | (j & 0xFFFFFFFF)


def site_state(k: SampleKey, c) -> bool:
    """True if site ``c`` is open in sample ``k``."""
    h = sample_hash(k.seed, k.sample)
    return bool(mix64(h + _pack(c[0], c[1]) * GOLDEN) >> 63)


# numpy ------------------------------------------------------------------

def _mix64_np(z: np.ndarray) -> np.ndarray:
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(MUL1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(MUL2)
    return z ^ (z >> np.uint64(31))


def site_states(seed: int, samples, i, j) -> np.ndarray:
    """Vectorized ``site_state`` over broadcastable arrays of samples and coordinates."""
    with np.errstate(over="ignore"):
        return _site_states(seed, samples, i, j)


def _site_states(seed, samples, i, j):
    samples = np.asarray(samples, dtype=np.uint64)
    seedh = _mix64_np(np.array([seed], dtype=np.uint64) + np.uint64(GOLDEN))[0]
    h = _mix64_np(seedh ^ samples)
    iu = np.asarray(i, dtype=np.int64).astype(np.uint64) & np.uint64(0xFFFFFFFF)
    ju = np.asarray(j, dtype=np.int64).astype(np.uint64) & np.uint64(0xFFFFFFFF)
    packed = (iu << np.uint64(32)) | ju
    return (_mix64_np(h + packed * np.uint64(GOLDEN)) >> np.uint64(63)).astype(bool)


# numba ------------------------------------------------------------------

_G = np.uint64(GOLDEN)
_M1 = np.uint64(MUL1)
_M2 = np.uint64(MUL2)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S32 = np.uint64(32)
_S63 = np.uint64(63)
_LO = np.uint64(0xFFFFFFFF)


@nb.njit(inline="always", cache=True)
def nb_mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@nb.njit(inline="always", cache=True)
def nb_sample_hash(seed, sample):
    return nb_mix64(nb_mix64(np.uint64(seed) + _G) ^ np.uint64(sample))


@nb.njit(inline="always", cache=True)
def nb_site_open(h, i, j):
    packed = ((np.uint64(np.int64(i)) & _LO) << _S32) | (np.uint64(np.int64(j)) & _LO)
    return (nb_mix64(h + packed * _G) >> _S63) == np.uint64(1)
