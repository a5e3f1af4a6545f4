"""Beat-sum accumulation kernel: numba-jitted loop with a numpy fallback.

The trace signal is a sum over retained coherence pairs,
y(t) = dc + sum_p [c_cos_p cos(w_p t) + c_sin_p sin(w_p t)],
evaluated for every time sample.  Pair counts reach ~1e5 for the default
configuration, so this loop dominates simulation runtime.  Set
SPINWEAVE_NO_NUMBA=1 to force the pure-numpy path (the env var is read on
every call, so benchmarks and tests can flip it without reloading).
"""

import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAS_NUMBA = False


def numba_disabled() -> bool:
    return os.environ.get("SPINWEAVE_NO_NUMBA", "").strip() not in ("", "0")


def beat_signal_numpy(dc, c_cos, c_sin, omega, t) -> np.ndarray:
    """Vectorized reference path, chunked over time to bound memory."""
    t = np.asarray(t, dtype=float)
    y = np.full(t.shape, float(dc))
    n_pairs = omega.size
    if n_pairs == 0:
        return y
    chunk = max(16, int(4_000_000 // n_pairs))
    for k in range(0, t.size, chunk):
        ph = np.outer(omega, t[k:k + chunk])
        y[k:k + chunk] += c_cos @ np.cos(ph) + c_sin @ np.sin(ph)
    return y


if HAS_NUMBA:
    from numba import prange

    _BLOCK = 512  # recurrence restart interval; bounds phase-rotation drift

    @njit(cache=True, parallel=True)
    def _beat_signal_jit_uniform(dc, c_cos, c_sin, omega, t, dt):  # pragma: no cover
        # One sincos per (pair, block), then a 2x2 rotation per sample:
        # cos/sin(w(t+dt)) from cos/sin(wt).  Blocks are disjoint slices of
        # y, so the prange result does not depend on thread count.
        n_t = t.shape[0]
        n_p = omega.shape[0]
        y = np.empty(n_t)
        n_blocks = (n_t + _BLOCK - 1) // _BLOCK
        for b in prange(n_blocks):
            i0 = b * _BLOCK
            i1 = min(i0 + _BLOCK, n_t)
            for i in range(i0, i1):
                y[i] = dc
            for p in range(n_p):
                w = omega[p]
                a = c_cos[p]
                s = c_sin[p]
                ph0 = w * t[i0]
                c = np.cos(ph0)
                sn = np.sin(ph0)
                cd = np.cos(w * dt)
                sd = np.sin(w * dt)
                for i in range(i0, i1):
                    y[i] += a * c + s * sn
                    cn = c * cd - sn * sd
                    sn = c * sd + sn * cd
                    c = cn
        return y

    @njit(cache=True, parallel=True)
    def _beat_signal_jit_exact(dc, c_cos, c_sin, omega, t):  # pragma: no cover
        n_t = t.shape[0]
        n_p = omega.shape[0]
        y = np.empty(n_t)
        for i in prange(n_t):
            acc = dc
            ti = t[i]
            for p in range(n_p):
                ph = omega[p] * ti
                acc += c_cos[p] * np.cos(ph) + c_sin[p] * np.sin(ph)
            y[i] = acc
        return y

    def beat_signal_numba(dc, c_cos, c_sin, omega, t) -> np.ndarray:
        t = np.ascontiguousarray(t, dtype=np.float64)
        args = (
            float(dc),
            np.ascontiguousarray(c_cos, dtype=np.float64),
            np.ascontiguousarray(c_sin, dtype=np.float64),
            np.ascontiguousarray(omega, dtype=np.float64),
            t,
        )
        if t.size >= 2:
            steps = np.diff(t)
            dt = steps[0]
            if np.max(np.abs(steps - dt)) <= 1e-9 * max(abs(dt), 1e-30):
                return _beat_signal_jit_uniform(*args, dt)
        return _beat_signal_jit_exact(*args)

else:  # pragma: no cover

    def beat_signal_numba(dc, c_cos, c_sin, omega, t) -> np.ndarray:
        raise RuntimeError("numba is not available")


def beat_signal(dc, c_cos, c_sin, omega, t) -> np.ndarray:
    if HAS_NUMBA and not numba_disabled():
        return beat_signal_numba(dc, c_cos, c_sin, omega, t)
    return beat_signal_numpy(dc, c_cos, c_sin, omega, t)
