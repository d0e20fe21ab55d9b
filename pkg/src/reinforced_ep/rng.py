"""SplitMix64 stream and seed derivation.

The engine keeps its generator state as a single unsigned 64-bit word so it
can be stored in a plain attribute, copied, and advanced inside numba
kernels.  SplitMix64 has period 2**64 and passes BigCrush; every output is
``mix64(state)`` after adding the golden-ratio increment to ``state``.

Draw conventions (all kernels follow them):

* a uniform on [0, 1) takes the top 53 bits of one output;
* a Bernoulli(p) is ``uniform < p`` (strict);
* an index uniform on ``{0, ..., m-1}`` for ``m < 2**32`` uses Lemire's
  multiply-and-reject on the top 32 bits, so it is exactly uniform and may
  consume more than one output.
"""

from __future__ import annotations

import numba as nb
import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_U_GAMMA = np.uint64(GOLDEN_GAMMA)
_U_MIX1 = np.uint64(_MIX1)
_U_MIX2 = np.uint64(_MIX2)
_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U11 = np.uint64(11)
_U32 = np.uint64(32)
_TWO32 = np.uint64(1 << 32)
_LOW32 = np.uint64(0xFFFFFFFF)
_INV53 = 1.0 / 9007199254740992.0


def mix64(z: int) -> int:
    """SplitMix64 finalizer; a bijection of the 64-bit integers."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def replicate_seed(master_seed: int, index: int) -> int:
    """Seed of replicate ``index`` under ``master_seed``.

    ``mix64(master_seed + (index + 1) * GOLDEN_GAMMA)``.  The increment is
    odd, so distinct indices below 2**64 give distinct pre-images and, since
    ``mix64`` is a bijection, distinct seeds.
    """
    if index < 0:
        raise ValueError("replicate index must be nonnegative")
    return mix64(master_seed + (index + 1) * GOLDEN_GAMMA)


def child_seed(seed: int, label: str) -> int:
    """Derive an independent stream seed for a named sub-task."""
    h = 0
    for ch in label.encode():
        h = mix64(h ^ ch)
    return mix64(seed ^ h)


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


@nb.njit(inline="always")
def next_u64(state):
    state = state + _U_GAMMA
    z = state
    z = (z ^ (z >> _U30)) * _U_MIX1
    z = (z ^ (z >> _U27)) * _U_MIX2
    return state, z ^ (z >> _U31)


@nb.njit(inline="always")
def next_uniform(state):
    state, x = next_u64(state)
    return state, np.float64(x >> _U11) * _INV53


@nb.njit(inline="always")
def next_index(state, m):
    """Uniform integer in [0, m) for 1 <= m < 2**32."""
    mm = np.uint64(m)
    threshold = (_TWO32 - mm) % mm
    while True:
        state, x = next_u64(state)
        prod = (x >> _U32) * mm
        if (prod & _LOW32) >= threshold:
            return state, np.int64(prod >> _U32)


@nb.njit(cache=True)
def uniforms(state, size):
    """``size`` uniforms from the stream; returns (new_state, array)."""
    out = np.empty(size, dtype=np.float64)
    for i in range(size):
        state, out[i] = next_uniform(state)
    return state, out
