"""Pure-NumPy reference implementations of the hot kernels.

Selected automatically when the compiled extension is unavailable (or when
``RIOT_LAB_FORCE_PY=1``).  Must stay numerically interchangeable with
``_hotloops.pyx``; the test suite cross-checks both backends.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "numpy"


def best_split(x: np.ndarray, y: np.ndarray) -> tuple[float, float, int]:
    """Best variance-reduction split of ``y`` by sorted feature ``x``.

    ``x`` must be sorted ascending with ``y`` aligned.  Candidate thresholds
    are midpoints between distinct consecutive ``x`` values.  Returns
    ``(threshold, gain, n_left)`` where gain is the reduction in summed
    squared error; ``(nan, -1.0, 0)`` when no valid split exists.
    """
    n = x.shape[0]
    if n < 2 or x[0] == x[n - 1]:
        return math.nan, -1.0, 0
    cs = np.cumsum(y)
    cs2 = np.cumsum(y * y)
    total, total2 = cs[-1], cs2[-1]
    parent_sse = total2 - total * total / n

    k = np.arange(1, n)  # left sizes
    valid = x[1:] != x[:-1]
    left_sum = cs[:-1]
    left_sse = cs2[:-1] - left_sum * left_sum / k
    right_sum = total - left_sum
    right_sse = (total2 - cs2[:-1]) - right_sum * right_sum / (n - k)
    gain = np.where(valid, parent_sse - left_sse - right_sse, -np.inf)

    best = int(np.argmax(gain))
    if not np.isfinite(gain[best]):
        return math.nan, -1.0, 0
    thr = 0.5 * (x[best] + x[best + 1])
    return float(thr), float(gain[best]), best + 1


def split_gain(x: np.ndarray, y: np.ndarray, threshold: float) -> tuple[float, int]:
    """Variance-reduction gain of a fixed threshold (``x <= threshold`` left).

    Returns ``(gain, n_left)``; gain is -1.0 when either side is empty.
    """
    n = x.shape[0]
    n_left = int(np.searchsorted(x, threshold, side="right"))
    if n_left == 0 or n_left == n:
        return -1.0, n_left
    total = float(np.sum(y))
    total2 = float(np.sum(y * y))
    ls = float(np.sum(y[:n_left]))
    ls2 = float(np.sum(y[:n_left] * y[:n_left]))
    parent_sse = total2 - total * total / n
    left_sse = ls2 - ls * ls / n_left
    rs = total - ls
    right_sse = (total2 - ls2) - rs * rs / (n - n_left)
    return parent_sse - left_sse - right_sse, n_left


def hampel(values: np.ndarray, window: int, n_sigmas: float) -> tuple[np.ndarray, np.ndarray]:
    """Hampel filter: replace outliers by the windowed median.

    A sample is an outlier when it deviates from the median of its centered
    ``window``-sample neighborhood by more than ``n_sigmas * 1.4826 * MAD``.
    Windows shrink at the trace edges.  Returns ``(filtered, changed_mask)``.
    """
    n = values.shape[0]
    half = window // 2
    out = values.copy()
    changed = np.zeros(n, dtype=bool)
    for i in range(n):
        lo = i - half if i >= half else 0
        hi = i + half + 1 if i + half + 1 <= n else n
        win = values[lo:hi]
        med = float(np.median(win))
        mad = float(np.median(np.abs(win - med)))
        if abs(values[i] - med) > n_sigmas * 1.4826 * mad:
            out[i] = med
            changed[i] = True
    return out, changed


def supercap_advance(
    v0: float,
    p_net_w: float,
    cap_f: float,
    dt_s: float,
    substep_s: float,
    v_floor: float,
    v_ceil: float,
) -> tuple[float, float, int]:
    """Forward-Euler advance of a supercap voltage under constant net power.

    dV/dt = P_net / (C * V).  Integrates for at most ``dt_s`` seconds in
    ``substep_s`` steps, stopping early if the voltage crosses ``v_floor``
    (hit=1) or ``v_ceil`` (hit=2).  Returns ``(v_end, elapsed_s, hit)``.
    """
    v = v0
    t = 0.0
    while t < dt_s - 1e-12:
        h = substep_s if dt_s - t > substep_s else dt_s - t
        v_next = v + h * p_net_w / (cap_f * v)
        if v_next <= v_floor:
            return v_floor, t + h, 1
        if v_next >= v_ceil:
            return v_ceil, t + h, 2
        v = v_next
        t += h
    return v, dt_s, 0
