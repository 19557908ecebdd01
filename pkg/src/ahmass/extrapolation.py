"""Richardson extrapolation of sphere integrals to infinite radius."""

import numpy as np

__all__ = ["richardson_table", "richardson"]


def richardson_table(values, radii, p0=1.0, dp=1.0):
    """Richardson table in the variable ``1/r``.

    ``values[k]`` is the integral on the sphere of radius ``radii[k]``
    (extra trailing axes are extrapolated componentwise).  Column ``j``
    removes the error term ``r^-(p0 + (j-1) dp)``.  Returns an array
    ``T[k, j]`` (NaN above the diagonal).
    """
    values = np.asarray(values, dtype=float)
    h = 1.0 / np.asarray(radii, dtype=float)
    K = len(h)
    T = np.full((K, K) + values.shape[1:], np.nan)
    T[:, 0] = values
    for j in range(1, K):
        p = p0 + (j - 1) * dp
        for k in range(j, K):
            ratio = (h[k - 1] / h[k]) ** p
            T[k, j] = T[k, j - 1] + (T[k, j - 1] - T[k - 1, j - 1]) / (ratio - 1.0)
    return T


def richardson(values, radii, p0=1.0, dp=1.0):
    """Extrapolated limit, error estimate and the diagonal of the table.

    The error estimate is the difference of the last two diagonal entries.
    """
    T = richardson_table(values, radii, p0, dp)
    diag = np.array([T[k, k] for k in range(len(radii))])
    err = np.abs(diag[-1] - diag[-2]) if len(diag) > 1 else np.full(diag.shape[1:], np.inf)
    return diag[-1], err, diag
