"""Counter-based random numbers: every draw is a pure function of
(seed, trial, attempt, stream, index), so any split of trials over workers
reproduces a serial run exactly.

The mixer is the SplitMix64 finaliser. Python-int, numpy-vector and numba
versions below produce bit-identical uniforms.
"""
from __future__ import annotations

import math

import numpy as np

MASK = 0xFFFFFFFFFFFFFFFF
C1 = 0xBF58476D1CE4E5B9
C2 = 0x94D049BB133111EB
GOLDEN = 0x9E3779B97F4A7C15
SEED_SALT = 0x5851F42D4C957F2D
STREAM_SHIFT = 48
INV_2_53 = 1.0 / 9007199254740992.0

# stream identifiers
S_COUNT, S_POS, S_ROT, S_FBLK, S_LOS_T, S_LOS_D, S_FADE_D = 1, 2, 3, 4, 5, 6, 7
S_RCS_T, S_RCS_I, S_CL_COUNT, S_CL_POS, S_RCS_Q, S_RCS_QI = 8, 9, 10, 11, 12, 13
S_MIS, S_FADE_C, S_FADE_CI, S_B1, S_COUNT_OUT, S_POS_OUT = 14, 15, 16, 17, 18, 19


def mix64(z: int) -> int:
    z &= MASK
    z = ((z ^ (z >> 30)) * C1) & MASK
    z = ((z ^ (z >> 27)) * C2) & MASK
    return z ^ (z >> 31)


def seed_key(seed: int) -> int:
    return mix64((seed & MASK) ^ SEED_SALT)


def trial_key(skey: int, trial: int, attempt: int = 0) -> int:
    return mix64((skey + mix64(trial * GOLDEN + attempt)) & MASK)


def uniform(key: int, stream: int, idx: int) -> float:
    """Uniform on the open interval (0, 1)."""
    h = mix64(key ^ mix64((stream << STREAM_SHIFT) + idx))
    return ((h >> 11) + 0.5) * INV_2_53


def uniforms(key: int, stream: int, idx) -> np.ndarray:
    """Vectorised ``uniform`` over an integer index array."""
    idx = np.asarray(idx, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(stream << STREAM_SHIFT) + idx
        z = _mix64_vec(z)
        h = _mix64_vec(np.uint64(key) ^ z)
    return ((h >> np.uint64(11)).astype(np.float64) + 0.5) * INV_2_53


def _mix64_vec(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(C1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(C2)
        return z ^ (z >> np.uint64(31))


def poisson(mean: float, key: int, stream: int, draw=uniform) -> int:
    """Poisson variate: inversion for small means, Hoermann's PTRS otherwise.

    Consumes uniforms (key, stream, 0), (key, stream, 1), ... in order.
    """
    if mean <= 0.0:
        return 0
    i = 0
    if mean < 10.0:
        k = 0
        p = math.exp(-mean)
        s = p
        u = draw(key, stream, 0)
        while u > s and k < 1000:
            k += 1
            p *= mean / k
            s += p
        return k
    slam = math.sqrt(mean)
    loglam = math.log(mean)
    b = 0.931 + 2.53 * slam
    a = -0.059 + 0.02483 * b
    invalpha = 1.1239 + 1.1328 / (b - 3.4)
    vr = 0.9277 - 3.6224 / (b - 2.0)
    while True:
        u = draw(key, stream, i) - 0.5
        v = draw(key, stream, i + 1)
        i += 2
        us = 0.5 - abs(u)
        k = math.floor((2.0 * a / us + b) * u + mean + 0.43)
        if us >= 0.07 and v <= vr:
            return int(k)
        if k < 0 or (us < 0.013 and v > us):
            continue
        if (math.log(v) + math.log(invalpha) - math.log(a / (us * us) + b)
                <= -mean + k * loglam - math.lgamma(k + 1.0)):
            return int(k)
