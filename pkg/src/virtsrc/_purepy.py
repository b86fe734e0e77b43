"""Pure numpy versions of the routines in ``_core``."""
import numpy as np

from .specfun import hankel01_numpy

hankel01 = hankel01_numpy


def kernel_matrices(targets, sources, normals, k):
    d = targets[:, None, :] - sources[None, :, :]
    r = np.hypot(d[..., 0], d[..., 1])
    if np.any(r < 1e-14):
        raise ValueError("target coincides with a virtual source")
    h0, h1 = hankel01_numpy(k * r)
    proj = (d[..., 0] * normals[None, :, 0] + d[..., 1] * normals[None, :, 1]) / r
    return 0.25j * h0, 0.25j * k * h1 * proj


def thomas_factor(lower, diag, upper, tol):
    n = diag.shape[0]
    cp = np.zeros(n, dtype=complex)
    den = np.empty(n, dtype=complex)
    den[0] = diag[0]
    if abs(den[0]) < tol:
        raise ZeroDivisionError("tridiagonal pivot below tolerance")
    for i in range(1, n):
        cp[i - 1] = upper[i - 1] / den[i - 1]
        den[i] = diag[i] - lower[i - 1] * cp[i - 1]
        if abs(den[i]) < tol:
            raise ZeroDivisionError("tridiagonal pivot below tolerance")
    return cp, den


def thomas_solve(lower, cp, den, rhs):
    y = np.array(rhs, dtype=complex)
    n = y.shape[0]
    y[0] = y[0] / den[0]
    for i in range(1, n):
        y[i] = (y[i] - lower[i - 1] * y[i - 1]) / den[i]
    for i in range(n - 2, -1, -1):
        y[i] = y[i] - cp[i] * y[i + 1]
    return y
