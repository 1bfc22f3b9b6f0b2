"""Chebyshev polynomials by the three-term recurrence (real or complex arguments)."""

import numpy as np


def chebyshev_table(nmax: int, x) -> np.ndarray:
    """Rows ``T_0(x), ..., T_nmax(x)``; shape ``(nmax + 1,) + shape(x)``."""
    x = np.asarray(x, dtype=complex)
    table = np.empty((nmax + 1,) + x.shape, dtype=complex)
    table[0] = 1.0
    if nmax >= 1:
        table[1] = x
    for k in range(2, nmax + 1):
        table[k] = 2.0 * x * table[k - 1] - table[k - 2]
    return table


def chebyshev_t(n: int, x):
    """``T_n(x)`` for a single degree ``n``."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    x = np.asarray(x, dtype=complex)
    prev, cur = np.ones_like(x), x
    if n == 0:
        out = prev
    else:
        for _ in range(n - 1):
            prev, cur = cur, 2.0 * x * cur - prev
        out = cur
    return out[()] if out.ndim == 0 else out
