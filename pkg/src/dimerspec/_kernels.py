"""Numerov propagation kernels.

These inner loops dominate the runtime of every solve, so they carry numba
@njit compilation by default.  Setting the environment variable
DIMERSPEC_DISABLE_JIT=1 (or numba being unavailable) selects the pure-Python
implementations instead; both paths are always importable under the *_py
names so benchmarks/bench_numerov.py can compare them directly.

All kernels integrate u'' = W(R) u with W = vbase - e2mu, where
vbase = 2*mu*V_eff(R) and e2mu = 2*mu*E, on a uniform grid of step h.
They rescale the running solution whenever it threatens the float64 range;
rescaling preserves node counts and log-derivatives.
"""

import os

import numpy as np

_HI = 1.0e250
_LO = 1.0e-250


def numerov_count_nodes_py(vbase, e2mu, h, n):
    """Outward sweep over vbase[:n]; return interior sign changes.

    By the Sturm oscillation argument this equals the number of bound
    eigenvalues strictly below E for the boundary problem on this grid.
    """
    h12 = h * h / 12.0
    c_prev = 1.0 - h12 * (vbase[0] - e2mu)
    c_cur = 1.0 - h12 * (vbase[1] - e2mu)
    y_prev = 0.0
    y_cur = 1e-30
    nodes = 0
    for i in range(2, n):
        c_next = 1.0 - h12 * (vbase[i] - e2mu)
        y_next = ((12.0 - 10.0 * c_cur) * y_cur - c_prev * y_prev) / c_next
        if (y_next > 0.0 and y_cur < 0.0) or (y_next < 0.0 and y_cur > 0.0):
            nodes += 1
        ay = abs(y_next)
        if ay > _HI:
            y_cur *= _LO
            y_next *= _LO
        elif 0.0 < ay < _LO:
            y_cur *= _HI
            y_next *= _HI
        y_prev = y_cur
        y_cur = y_next
        c_prev = c_cur
        c_cur = c_next
    return nodes


def numerov_shoot_py(vbase, e2mu, h, m, n):
    """Two-sided sweep meeting at index m; return the log-derivative mismatch.

    Outward from 0 and inward from n-1, both branches scaled to 1 at m.
    Returns (mismatch, left_nodes, right_nodes); the mismatch has a simple
    zero at each eigenvalue.
    """
    h12 = h * h / 12.0

    # outward 0 .. m+1, capturing y at m-1, m, m+1
    c_prev = 1.0 - h12 * (vbase[0] - e2mu)
    c_cur = 1.0 - h12 * (vbase[1] - e2mu)
    y_prev = 0.0
    y_cur = 1e-30
    nl = 0
    yl_m1 = 0.0
    yl_m = 0.0
    yl_p1 = 0.0
    if m == 1:
        yl_m1 = y_prev
        yl_m = y_cur
    for i in range(2, m + 2):
        c_next = 1.0 - h12 * (vbase[i] - e2mu)
        y_next = ((12.0 - 10.0 * c_cur) * y_cur - c_prev * y_prev) / c_next
        if i <= m and ((y_next > 0.0 and y_cur < 0.0) or (y_next < 0.0 and y_cur > 0.0)):
            nl += 1
        ay = abs(y_next)
        if ay > _HI:
            y_cur *= _LO
            y_next *= _LO
            yl_m1 *= _LO
            yl_m *= _LO
        elif 0.0 < ay < _LO:
            y_cur *= _HI
            y_next *= _HI
            yl_m1 *= _HI
            yl_m *= _HI
        if i == m - 1:
            yl_m1 = y_next
        elif i == m:
            yl_m = y_next
        elif i == m + 1:
            yl_p1 = y_next
        y_prev = y_cur
        y_cur = y_next
        c_prev = c_cur
        c_cur = c_next

    # inward n-1 .. m-1, capturing y at m+1, m, m-1
    c_prev = 1.0 - h12 * (vbase[n - 1] - e2mu)
    c_cur = 1.0 - h12 * (vbase[n - 2] - e2mu)
    y_prev = 0.0
    y_cur = 1e-30
    nr = 0
    yr_m1 = 0.0
    yr_m = 0.0
    yr_p1 = 0.0
    if m == n - 2:
        yr_p1 = y_prev
        yr_m = y_cur
    for i in range(n - 3, m - 2, -1):
        c_next = 1.0 - h12 * (vbase[i] - e2mu)
        y_next = ((12.0 - 10.0 * c_cur) * y_cur - c_prev * y_prev) / c_next
        if i >= m and ((y_next > 0.0 and y_cur < 0.0) or (y_next < 0.0 and y_cur > 0.0)):
            nr += 1
        ay = abs(y_next)
        if ay > _HI:
            y_cur *= _LO
            y_next *= _LO
            yr_p1 *= _LO
            yr_m *= _LO
        elif 0.0 < ay < _LO:
            y_cur *= _HI
            y_next *= _HI
            yr_p1 *= _HI
            yr_m *= _HI
        if i == m + 1:
            yr_p1 = y_next
        elif i == m:
            yr_m = y_next
        elif i == m - 1:
            yr_m1 = y_next
        y_prev = y_cur
        y_cur = y_next
        c_prev = c_cur
        c_cur = c_next

    if yl_m == 0.0 or yr_m == 0.0:
        return np.nan, nl, nr
    dl = (yl_p1 - yl_m1) / (2.0 * h * yl_m)
    dr = (yr_p1 - yr_m1) / (2.0 * h * yr_m)
    return dl - dr, nl, nr


def numerov_build_py(vbase, e2mu, h, m, out, n):
    """Fill out[:n] with the two-sided solution glued at index m.

    Returns 0 on success, 1 if either branch vanished at the match point.
    The result is unnormalized; rescaling events multiply the already
    stored prefix so ratios stay exact.
    """
    h12 = h * h / 12.0

    out[0] = 0.0
    out[1] = 1e-30
    c_prev = 1.0 - h12 * (vbase[0] - e2mu)
    c_cur = 1.0 - h12 * (vbase[1] - e2mu)
    for i in range(2, m + 1):
        c_next = 1.0 - h12 * (vbase[i] - e2mu)
        out[i] = ((12.0 - 10.0 * c_cur) * out[i - 1] - c_prev * out[i - 2]) / c_next
        ay = abs(out[i])
        if ay > _HI:
            for j in range(i + 1):
                out[j] *= _LO
        elif 0.0 < ay < _LO:
            for j in range(i + 1):
                out[j] *= _HI
        c_prev = c_cur
        c_cur = c_next
    left_m = out[m]

    out[n - 1] = 0.0
    out[n - 2] = 1e-30
    c_prev = 1.0 - h12 * (vbase[n - 1] - e2mu)
    c_cur = 1.0 - h12 * (vbase[n - 2] - e2mu)
    for i in range(n - 3, m - 1, -1):
        c_next = 1.0 - h12 * (vbase[i] - e2mu)
        out[i] = ((12.0 - 10.0 * c_cur) * out[i + 1] - c_prev * out[i + 2]) / c_next
        ay = abs(out[i])
        if ay > _HI:
            for j in range(i, n):
                out[j] *= _LO
        elif 0.0 < ay < _LO:
            for j in range(i, n):
                out[j] *= _HI
        c_prev = c_cur
        c_cur = c_next
    right_m = out[m]

    if left_m == 0.0 or right_m == 0.0:
        return 1
    scale = left_m / right_m
    for i in range(m, n):
        out[i] *= scale
    return 0


def numerov_forward_py(vbase, e2mu, h, y0, y1, out, n):
    """Pure outward propagation storing the full solution (continuum states)."""
    h12 = h * h / 12.0
    out[0] = y0
    out[1] = y1
    c_prev = 1.0 - h12 * (vbase[0] - e2mu)
    c_cur = 1.0 - h12 * (vbase[1] - e2mu)
    for i in range(2, n):
        c_next = 1.0 - h12 * (vbase[i] - e2mu)
        out[i] = ((12.0 - 10.0 * c_cur) * out[i - 1] - c_prev * out[i - 2]) / c_next
        ay = abs(out[i])
        if ay > _HI:
            for j in range(i + 1):
                out[j] *= _LO
        elif 0.0 < ay < _LO:
            for j in range(i + 1):
                out[j] *= _HI
        c_prev = c_cur
        c_cur = c_next
    return 0


def _jit_requested() -> bool:
    flag = os.environ.get("DIMERSPEC_DISABLE_JIT", "").strip().lower()
    return flag not in ("1", "true", "yes", "on")


JIT_ENABLED = False

numerov_count_nodes = numerov_count_nodes_py
numerov_shoot = numerov_shoot_py
numerov_build = numerov_build_py
numerov_forward = numerov_forward_py

if _jit_requested():
    try:
        from numba import njit
    except ImportError:
        pass
    else:
        _opts = {"cache": True, "nogil": True, "fastmath": False}
        numerov_count_nodes = njit(**_opts)(numerov_count_nodes_py)
        numerov_shoot = njit(**_opts)(numerov_shoot_py)
        numerov_build = njit(**_opts)(numerov_build_py)
        numerov_forward = njit(**_opts)(numerov_forward_py)
        JIT_ENABLED = True
