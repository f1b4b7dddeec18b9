"""Inner loops shared by the encoders.

Every kernel has two implementations with identical results: a numba
``@njit`` loop and a pure-numpy version. The public wrappers dispatch on
the active backend (see :mod:`dpenc._backend`). All kernels take
time-major ``(T, C)`` arrays and return ``int8`` event matrices.
"""

from __future__ import annotations

import numpy as np

from dpenc._backend import get_backend, njit

# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------


def sign_crossings_numpy(g: np.ndarray) -> np.ndarray:
    cur, prev = g[1:], g[:-1]
    out = np.zeros(cur.shape, dtype=np.int8)
    out[(cur > 0) & (prev <= 0)] = 1
    out[(cur < 0) & (prev >= 0)] = -1
    return out


def delta_numpy(x: np.ndarray, threshold: float) -> np.ndarray:
    T, C = x.shape
    out = np.zeros((T - 1, C), dtype=np.int8)
    ref = x[0].copy()
    for t in range(1, T):
        d = x[t] - ref
        up = d >= threshold
        down = (d <= -threshold) & ~up
        out[t - 1, up] = 1
        out[t - 1, down] = -1
        fired = up | down
        ref[fired] = x[t, fired]
    return out


def ftem_numpy(x: np.ndarray, wave: np.ndarray, center: float) -> np.ndarray:
    T, C = x.shape
    out = np.zeros((T - 1, C), dtype=np.int8)
    anchor = np.full(C, center, dtype=np.float64)
    t0 = np.zeros(C, dtype=np.int64)
    direction = np.ones(C, dtype=np.float64)
    prev = x[0] - (anchor + direction * wave[0])
    for t in range(1, T):
        g = x[t] - (anchor + direction * wave[t - t0])
        up = (g > 0) & (prev <= 0)
        down = (g < 0) & (prev >= 0)
        out[t - 1, up] = 1
        out[t - 1, down] = -1
        fired = up | down
        anchor[fired] = x[t, fired]
        t0[fired] = t
        direction[up] = -1.0
        direction[down] = 1.0
        prev = g
    return out


def iftem_numpy(x: np.ndarray, threshold: float, leak: float, bias: float) -> np.ndarray:
    T, C = x.shape
    out = np.zeros((T, C), dtype=np.int8)
    v = np.zeros(C, dtype=np.float64)
    for t in range(T):
        v = leak * v + x[t] + bias
        up = v >= threshold
        down = (v <= -threshold) & ~up
        out[t, up] = 1
        out[t, down] = -1
        v[up] -= threshold
        v[down] += threshold
    return out


def level_crossings_numpy(levels: np.ndarray, n_bins: int) -> np.ndarray:
    T, C = levels.shape
    j = np.arange(n_bins)
    lo = levels[:-1, :, None]
    hi = levels[1:, :, None]
    rising = (lo < j) & (j <= hi)
    falling = (hi < j) & (j <= lo)
    out = rising.astype(np.int8) - falling.astype(np.int8)
    return out.reshape(T - 1, C * n_bins)


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------


@njit
def sign_crossings_numba(g):
    T, C = g.shape
    out = np.zeros((T - 1, C), dtype=np.int8)
    for t in range(1, T):
        for c in range(C):
            cur = g[t, c]
            prev = g[t - 1, c]
            if cur > 0.0 and prev <= 0.0:
                out[t - 1, c] = 1
            elif cur < 0.0 and prev >= 0.0:
                out[t - 1, c] = -1
    return out


@njit
def delta_numba(x, threshold):
    T, C = x.shape
    out = np.zeros((T - 1, C), dtype=np.int8)
    for c in range(C):
        ref = x[0, c]
        for t in range(1, T):
            d = x[t, c] - ref
            if d >= threshold:
                out[t - 1, c] = 1
                ref = x[t, c]
            elif d <= -threshold:
                out[t - 1, c] = -1
                ref = x[t, c]
    return out


@njit
def ftem_numba(x, wave, center):
    T, C = x.shape
    out = np.zeros((T - 1, C), dtype=np.int8)
    for c in range(C):
        anchor = center
        t0 = 0
        direction = 1.0
        prev = x[0, c] - (anchor + direction * wave[0])
        for t in range(1, T):
            g = x[t, c] - (anchor + direction * wave[t - t0])
            if g > 0.0 and prev <= 0.0:
                out[t - 1, c] = 1
                anchor = x[t, c]
                t0 = t
                direction = -1.0
            elif g < 0.0 and prev >= 0.0:
                out[t - 1, c] = -1
                anchor = x[t, c]
                t0 = t
                direction = 1.0
            prev = g
    return out


@njit
def iftem_numba(x, threshold, leak, bias):
    T, C = x.shape
    out = np.zeros((T, C), dtype=np.int8)
    for c in range(C):
        v = 0.0
        for t in range(T):
            v = leak * v + x[t, c] + bias
            if v >= threshold:
                out[t, c] = 1
                v -= threshold
            elif v <= -threshold:
                out[t, c] = -1
                v += threshold
    return out


@njit
def level_crossings_numba(levels, n_bins):
    T, C = levels.shape
    out = np.zeros((T - 1, C * n_bins), dtype=np.int8)
    for t in range(1, T):
        for c in range(C):
            lo = levels[t - 1, c]
            hi = levels[t, c]
            base = c * n_bins
            if hi > lo:
                for j in range(lo + 1, hi + 1):
                    out[t - 1, base + j] = 1
            elif hi < lo:
                for j in range(hi + 1, lo + 1):
                    out[t - 1, base + j] = -1
    return out


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def sign_crossings(g: np.ndarray) -> np.ndarray:
    """+1 where ``g`` turns positive from <= 0, -1 where it turns negative from >= 0.

    Row ``i`` of the result refers to row ``i + 1`` of ``g``.
    """
    g = _f64(g)
    if get_backend() == "numba":
        return sign_crossings_numba(g)
    return sign_crossings_numpy(g)


def delta_events(x: np.ndarray, threshold: float) -> np.ndarray:
    x = _f64(x)
    if get_backend() == "numba":
        return delta_numba(x, float(threshold))
    return delta_numpy(x, float(threshold))


def ftem_events(x: np.ndarray, wave: np.ndarray, center: float) -> np.ndarray:
    x, wave = _f64(x), _f64(wave)
    if wave.shape[0] < x.shape[0]:
        raise ValueError("reference table shorter than the signal")
    if get_backend() == "numba":
        return ftem_numba(x, wave, float(center))
    return ftem_numpy(x, wave, float(center))


def iftem_events(x: np.ndarray, threshold: float, leak: float, bias: float) -> np.ndarray:
    x = _f64(x)
    if get_backend() == "numba":
        return iftem_numba(x, float(threshold), float(leak), float(bias))
    return iftem_numpy(x, float(threshold), float(leak), float(bias))


def level_crossings(levels: np.ndarray, n_bins: int) -> np.ndarray:
    levels = np.ascontiguousarray(levels, dtype=np.int64)
    if get_backend() == "numba":
        return level_crossings_numba(levels, int(n_bins))
    return level_crossings_numpy(levels, int(n_bins))
