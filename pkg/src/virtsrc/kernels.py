"""2D fundamental solution and its source-normal derivative at displaced sources."""
import numpy as np

from . import _backend
from .specfun import hankel01


def _distance(x, z):
    d = np.asarray(x, dtype=float) - np.asarray(z, dtype=float)
    r = np.hypot(d[..., 0], d[..., 1])
    if np.any(r < 1e-14):
        raise ValueError("target coincides with a source point")
    return d, r


def phi_2d(k: float, x, z):
    """Fundamental solution ``(i/4) H_0(k |x - z|)``."""
    _, r = _distance(x, z)
    h0, _ = hankel01(np.atleast_1d(k * r))
    out = 0.25j * h0
    return out[0] if np.ndim(r) == 0 else out.reshape(np.shape(r))


def kernel_double(k: float, x, z, nu):
    """``d/d nu(y)`` of the fundamental solution, differentiating in the source point.

    Equals ``(ik/4) H_1(k r) nu . (x - z) / r`` with ``r = |x - z|``.
    """
    d, r = _distance(x, z)
    nu = np.asarray(nu, dtype=float)
    _, h1 = hankel01(np.atleast_1d(k * r))
    h1 = h1[0] if np.ndim(r) == 0 else h1.reshape(np.shape(r))
    proj = (nu[..., 0] * d[..., 0] + nu[..., 1] * d[..., 1]) / r
    return 0.25j * k * h1 * proj


def kernel_matrices(k: float, targets, sources, normals, pure: bool = False):
    """Dense ``(K_S, K_D)`` between every target and every (source, normal) pair."""
    ops = _backend.get_ops(pure)
    return ops.kernel_matrices(
        np.ascontiguousarray(targets, dtype=float),
        np.ascontiguousarray(sources, dtype=float),
        np.ascontiguousarray(normals, dtype=float),
        float(k),
    )
