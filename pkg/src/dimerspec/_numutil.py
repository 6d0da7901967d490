"""Small shared numerics helpers."""

from __future__ import annotations

import numpy as np


def simpson_uniform(y: np.ndarray, h: float) -> float:
    """Composite Simpson rule on a uniform grid.

    Even sample counts get the usual cubic end correction on the last
    interval, so the rule stays O(h^4) regardless of parity.
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    if n < 2:
        return 0.0
    if n == 2:
        return 0.5 * h * (y[0] + y[1])
    if n % 2 == 0:
        tail = h * (5.0 * y[-1] + 8.0 * y[-2] - y[-3]) / 12.0
        y = y[:-1]
    else:
        tail = 0.0
    s = y[0] + y[-1] + 4.0 * float(np.sum(y[1:-1:2])) + 2.0 * float(np.sum(y[2:-2:2]))
    return s * h / 3.0 + tail


def linear_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Least-squares line y = a*x + b; returns (a, b, r_squared)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a, b = np.polyfit(x, y, 1)
    resid = y - (a * x + b)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(a), float(b), r2
