"""Adaptive truncation of geometric-type series.

Every infinite sum in the package has terms that first grow (at most
geometrically) and then decay geometrically.  Such a branch is cut at the
first index past the peak where the geometric tail estimate
``|t_n| / (1 - q_n)``, ``q_n = |t_n| / |t_(n-1)|``, drops below ``tol`` times
the running sum of magnitudes.
"""

import numpy as np

from .exceptions import ResolutionError

MAX_INDEX = 10**6


def collect_terms(term, start, step, tol, chunk=128):
    """Evaluate ``term`` along ``n = start, start + step, ...`` until negligible.

    ``term`` maps an integer array of shape ``(k,)`` to an array of shape
    ``(k, ...)``.  The stopping test is applied elementwise over the trailing
    axes and must hold for every element.

    Returns
    -------
    n : ndarray of int, shape (m,)
        Kept indices (the first omitted one is not included).
    values : ndarray, shape (m, ...)
        Terms at the kept indices.
    """
    kept_n = []
    kept_v = []
    total = None
    prev = None
    offset = 0
    while True:
        n = start + step * (offset + np.arange(chunk))
        if abs(int(n[-1])) > MAX_INDEX:
            raise ResolutionError(
                f"series did not converge within |n| <= {MAX_INDEX} (tol={tol:g})"
            )
        values = np.asarray(term(n))
        mag = np.abs(values)
        if total is None:
            total = np.zeros(mag.shape[1:])
            prev = np.full(mag.shape[1:], np.inf)
        before = total + np.cumsum(mag, axis=0) - mag
        previous = np.concatenate([prev[None], mag[:-1]], axis=0)
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.where(previous > 0, mag / previous, 0.0)
            tail = np.where(q < 1.0, mag / (1.0 - q), np.inf)
        ok = (tail <= tol * before) & (mag <= previous)
        ok = ok.reshape(len(n), -1).all(axis=1)
        if offset == 0:
            ok[0] = False
        hits = np.flatnonzero(ok)
        if hits.size:
            stop = hits[0]
            kept_n.append(n[:stop])
            kept_v.append(values[:stop])
            break
        kept_n.append(n)
        kept_v.append(values)
        total = total + mag.sum(axis=0)
        prev = mag[-1]
        offset += chunk
        chunk *= 2
    return np.concatenate(kept_n), np.concatenate(kept_v, axis=0)
