# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: tree split search, Hampel filtering, supercap Euler.

Mirrors ``numpy_ref.py``; keep both in sync.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport NAN, fabs

cnp.import_array()

BACKEND = "cython"


def best_split(double[::1] x, double[::1] y):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, best_i = -1
    cdef double total = 0.0, total2 = 0.0
    cdef double ls = 0.0, ls2 = 0.0, rs, rs2
    cdef double parent_sse, gain, best_gain = -1.0
    if n < 2 or x[0] == x[n - 1]:
        return NAN, -1.0, 0
    for i in range(n):
        total += y[i]
        total2 += y[i] * y[i]
    parent_sse = total2 - total * total / n
    for i in range(n - 1):
        ls += y[i]
        ls2 += y[i] * y[i]
        if x[i + 1] == x[i]:
            continue
        rs = total - ls
        rs2 = total2 - ls2
        gain = parent_sse - (ls2 - ls * ls / (i + 1)) - (rs2 - rs * rs / (n - i - 1))
        if best_i < 0 or gain > best_gain:
            best_gain = gain
            best_i = i
    if best_i < 0:
        return NAN, -1.0, 0
    return 0.5 * (x[best_i] + x[best_i + 1]), best_gain, best_i + 1


def split_gain(double[::1] x, double[::1] y, double threshold):
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, n_left = 0
    cdef double total = 0.0, total2 = 0.0, ls = 0.0, ls2 = 0.0, rs, rs2
    for i in range(n):
        if x[i] <= threshold:
            n_left += 1
    if n_left == 0 or n_left == n:
        return -1.0, n_left
    for i in range(n):
        total += y[i]
        total2 += y[i] * y[i]
        if i < n_left:
            ls += y[i]
            ls2 += y[i] * y[i]
    rs = total - ls
    rs2 = total2 - ls2
    return (
        (total2 - total * total / n)
        - (ls2 - ls * ls / n_left)
        - (rs2 - rs * rs / (n - n_left)),
        n_left,
    )


cdef double _median_sorted(double* buf, Py_ssize_t m) noexcept:
    if m % 2 == 1:
        return buf[m // 2]
    return 0.5 * (buf[m // 2 - 1] + buf[m // 2])


cdef void _insertion_sort(double* buf, Py_ssize_t m) noexcept:
    cdef Py_ssize_t i, j
    cdef double key
    for i in range(1, m):
        key = buf[i]
        j = i - 1
        while j >= 0 and buf[j] > key:
            buf[j + 1] = buf[j]
            j -= 1
        buf[j + 1] = key


def hampel(double[::1] values, Py_ssize_t window, double n_sigmas):
    cdef Py_ssize_t n = values.shape[0]
    cdef Py_ssize_t half = window // 2
    cdef Py_ssize_t i, j, lo, hi, m
    cdef double med, mad
    out_arr = np.array(values, dtype=np.float64, copy=True)
    changed_arr = np.zeros(n, dtype=np.uint8)
    cdef double[::1] out = out_arr
    cdef unsigned char[::1] changed = changed_arr
    scratch_arr = np.empty(window, dtype=np.float64)
    cdef double[::1] scratch = scratch_arr
    for i in range(n):
        lo = i - half
        if lo < 0:
            lo = 0
        hi = i + half + 1
        if hi > n:
            hi = n
        m = hi - lo
        for j in range(m):
            scratch[j] = values[lo + j]
        _insertion_sort(&scratch[0], m)
        med = _median_sorted(&scratch[0], m)
        for j in range(m):
            scratch[j] = fabs(values[lo + j] - med)
        _insertion_sort(&scratch[0], m)
        mad = _median_sorted(&scratch[0], m)
        if fabs(values[i] - med) > n_sigmas * 1.4826 * mad:
            out[i] = med
            changed[i] = 1
    return out_arr, changed_arr.astype(bool)


def supercap_advance(
    double v0,
    double p_net_w,
    double cap_f,
    double dt_s,
    double substep_s,
    double v_floor,
    double v_ceil,
):
    cdef double v = v0, t = 0.0, h, v_next
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
