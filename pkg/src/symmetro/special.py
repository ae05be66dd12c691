"""Special functions needed by the weight-parameter closed forms."""
import math

import numpy as np

from .exceptions import DomainError

__all__ = ["dilog", "artanh"]

artanh = np.arctanh

_PI2_6 = math.pi ** 2 / 6


def _li2_series(z):
    # z <= 1/2, so terms shrink at least like 2**-n
    total, zn, n = 0.0, z, 1
    while True:
        term = zn / (n * n)
        total += term
        if term < 1e-17 * max(total, 1e-300):
            return total
        n += 1
        zn *= z


def _dilog_scalar(z):
    if not 0.0 <= z <= 1.0:
        raise DomainError(f"dilog is implemented on [0, 1], got {z!r}")
    if z == 0.0:
        return 0.0
    if z == 1.0:
        return _PI2_6
    if z <= 0.5:
        return _li2_series(z)
    w = 1.0 - z
    return _PI2_6 - math.log1p(-w) * math.log(w) - _li2_series(w)


def dilog(z):
    """Real dilogarithm ``Li2(z) = sum_{n>=1} z**n / n**2`` for ``0 <= z <= 1``.

    Arguments above 1/2 go through the reflection
    ``Li2(z) = pi**2/6 - log(z) log(1-z) - Li2(1-z)``.
    Accepts scalars or arrays.
    """
    if np.ndim(z) == 0:
        return _dilog_scalar(float(z))
    arr = np.asarray(z, dtype=float)
    return np.array([_dilog_scalar(x) for x in arr.ravel()]).reshape(arr.shape)
