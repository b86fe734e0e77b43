"""Integer-order Bessel and Hankel functions of real positive argument.

Three regimes are combined:

* Miller's backward recurrence for ``J_n`` (normalised either by the
  Neumann identity ``J_0 + 2 sum J_2k = 1`` or, for large arguments, by the
  asymptotic ``J_0``/``J_1``),
* Neumann series in the ``J_2k`` for ``Y_0`` and ``Y_1`` at moderate
  arguments,
* Hankel's asymptotic expansion of ``H_0`` and ``H_1`` for large arguments.

``Y_n`` for ``n >= 2`` follows from forward recurrence, which is stable
because ``Y_n`` is the dominant solution.

The order-0/1 pair ``hankel01`` is the hot path for kernel assembly and is
dispatched to the compiled core when it is available.
"""
from __future__ import annotations

import math

import numpy as np

from . import _backend

EULER_GAMMA = 0.57721566490153286061
MAX_ORDER = 200

# arguments at or above this use the Hankel asymptotic expansion for orders 0, 1
ASYMPTOTIC_THRESHOLD = 25.0
_ASYMPTOTIC_TERMS = 30
_RESCALE = 1e250


def _as_positive_array(x):
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise ValueError("Bessel functions are only defined here for x > 0")
    return arr


def miller_start_order(nmax: int, xmax: float) -> int:
    """Even starting order for the backward recurrence."""
    top = max(float(nmax), float(xmax))
    m = int(top + 10.0 * top ** (1.0 / 3.0) + 20.0)
    return m + (m % 2)


def _miller(nmax: int, x: np.ndarray):
    """Unnormalised backward recurrence.

    Returns ``(f, norm, s0, s1)`` where ``f[j] / norm = J_j(x)`` for
    ``j <= nmax`` and ``s0``, ``s1`` are the Neumann sums needed for
    ``Y_0`` and ``Y_1`` (same normalisation as ``f``).
    """
    nmax = max(nmax, 1)
    m = miller_start_order(nmax, float(x.max()))
    out = np.zeros((nmax + 1,) + x.shape)
    f_next = np.zeros_like(x)
    f_cur = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    s0 = np.zeros_like(x)  # sum_k (-1)^k f_2k / k
    s1 = np.zeros_like(x)  # sum_k (-1)^k (f_{2k-1} - f_{2k+1}) / k
    two_over_x = 2.0 / x
    for j in range(m, 0, -1):
        if j <= nmax:
            out[j] = f_cur
        if j % 2 == 0:
            kk = j // 2
            norm += 2.0 * f_cur
            s0 += (-1.0 if kk % 2 else 1.0) * f_cur / kk
        else:
            kp = (j + 1) // 2
            coef = (-1.0 if kp % 2 else 1.0) / kp
            if j >= 3:
                km = (j - 1) // 2
                coef -= (-1.0 if km % 2 else 1.0) / km
            s1 += coef * f_cur
        f_prev = j * two_over_x * f_cur - f_next
        f_next, f_cur = f_cur, f_prev
        big = np.abs(f_cur) > _RESCALE
        if big.any():
            scale = np.where(big, 1.0 / _RESCALE, 1.0)
            f_cur = f_cur * scale
            f_next = f_next * scale
            norm *= scale
            s0 *= scale
            s1 *= scale
            out *= scale
    out[0] = f_cur
    norm += f_cur
    return out, norm, s0, s1


def _hankel_asymptotic(nu: int, x: np.ndarray, terms: int = _ASYMPTOTIC_TERMS):
    """Hankel expansion ``H_nu(x) ~ sqrt(2/(pi x)) e^{i(x - nu pi/2 - pi/4)} sum a_k (i/x)^k``."""
    mu = 4.0 * nu * nu
    series = np.ones(x.shape, dtype=complex)
    term = np.ones(x.shape, dtype=complex)
    ix = 1j / x
    for kk in range(1, terms + 1):
        term = term * ((mu - (2 * kk - 1) ** 2) / (8.0 * kk)) * ix
        series += term
    # e^{-i(nu pi/2 + pi/4)} applied exactly
    phase = (np.cos(x) + 1j * np.sin(x)) * ((1.0 - 1j) / math.sqrt(2.0)) * ((-1j) ** (nu % 4))
    return np.sqrt(2.0 / (np.pi * x)) * phase * series


def _jy01_moderate(x: np.ndarray, nmax: int = 1):
    f, norm, s0, s1 = _miller(nmax, x)
    j = f / norm
    lg = np.log(0.5 * x) + EULER_GAMMA
    y0 = (2.0 / np.pi) * (lg * j[0] - 2.0 * s0 / norm)
    y1 = (2.0 / np.pi) * (-j[0] / x + lg * j[1] + s1 / norm)
    return j, y0, y1


def hankel01_numpy(x):
    """``(H_0(x), H_1(x))`` for an array of positive arguments, pure numpy."""
    x = _as_positive_array(x)
    shape = x.shape
    xf = x.ravel()
    h0 = np.empty(xf.shape, dtype=complex)
    h1 = np.empty(xf.shape, dtype=complex)
    small = xf < ASYMPTOTIC_THRESHOLD
    if small.any():
        xs = xf[small]
        # bucket by magnitude so the starting order tracks the argument
        edges = [0.0, 2.0, 8.0, 16.0, ASYMPTOTIC_THRESHOLD]
        for lo, hi in zip(edges[:-1], edges[1:]):
            sel = (xs >= lo) & (xs < hi)
            if not sel.any():
                continue
            j, y0, y1 = _jy01_moderate(xs[sel])
            idx = np.flatnonzero(small)[sel]
            h0[idx] = j[0] + 1j * y0
            h1[idx] = j[1] + 1j * y1
    large = ~small
    if large.any():
        xl = xf[large]
        h0[large] = _hankel_asymptotic(0, xl)
        h1[large] = _hankel_asymptotic(1, xl)
    return h0.reshape(shape), h1.reshape(shape)


def hankel01(x):
    """``(H_0^{(1)}(x), H_1^{(1)}(x))`` elementwise; uses the compiled core if present."""
    x = _as_positive_array(x)
    if _backend.HAVE_COMPILED and x.ndim > 0:
        h0, h1 = _backend.core.hankel01(np.ascontiguousarray(x.ravel()))
        return np.asarray(h0).reshape(x.shape), np.asarray(h1).reshape(x.shape)
    return hankel01_numpy(x)


def bessel_jy_orders(nmax: int, x):
    """All ``J_n(x)`` and ``Y_n(x)`` for ``n = 0..nmax``.

    Parameters
    ----------
    nmax : int
        Highest order, ``0 <= nmax <= 200``.
    x : float or array_like
        Positive arguments.

    Returns
    -------
    J, Y : ndarray, shape ``(nmax + 1,) + x.shape``

    Raises
    ------
    ValueError
        For ``x <= 0`` or an order outside the supported range.
    OverflowError
        If some ``Y_n`` exceeds the double range.
    """
    nmax = int(nmax)
    if nmax < 0 or nmax > MAX_ORDER:
        raise ValueError(f"order must lie in [0, {MAX_ORDER}], got {nmax}")
    x = _as_positive_array(x)
    shape = x.shape
    xf = np.atleast_1d(x.ravel())
    top = max(nmax, 1)
    jj = np.empty((top + 1, xf.size))
    yy = np.empty((top + 1, xf.size))

    small = xf < ASYMPTOTIC_THRESHOLD
    if small.any():
        j, y0, y1 = _jy01_moderate(xf[small], top)
        jj[:, small] = j
        yy[0, small] = y0
        yy[1, small] = y1
    large = ~small
    if large.any():
        xl = xf[large]
        h0 = _hankel_asymptotic(0, xl)
        h1 = _hankel_asymptotic(1, xl)
        yy[0, large] = h0.imag
        yy[1, large] = h1.imag
        if top <= 1:
            jj[0, large] = h0.real
            jj[1, large] = h1.real
        else:
            f = _miller(top, xl)[0]
            # normalise on whichever of J_0, J_1 is further from a zero
            use0 = np.abs(h0.real) >= np.abs(h1.real)
            ratio = np.where(use0, h0.real, h1.real) / np.where(use0, f[0], f[1])
            jm = f * ratio
            # forward recurrence is accurate while the order stays well below x
            jf = np.empty_like(jm)
            jf[0] = h0.real
            jf[1] = h1.real
            for n in range(1, top):
                jf[n + 1] = (2.0 * n / xl) * jf[n] - jf[n - 1]
            orders = np.arange(top + 1)[:, None]
            jj[:, large] = np.where(orders <= 0.5 * xl[None, :], jf, jm)
            jj[0, large] = h0.real
            jj[1, large] = h1.real

    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, top):
            yy[n + 1] = (2.0 * n / xf) * yy[n] - yy[n - 1]
    if not np.all(np.isfinite(yy[: nmax + 1])):
        raise OverflowError("Y_n overflows the double range for the requested order/argument")
    jj = jj[: nmax + 1].reshape((nmax + 1,) + shape)
    yy = yy[: nmax + 1].reshape((nmax + 1,) + shape)
    return jj, yy


def bessel_jy(order: int, x):
    """``(J_order(x), Y_order(x))``."""
    jj, yy = bessel_jy_orders(order, x)
    jn, yn = jj[order], yy[order]
    if jn.ndim == 0:
        return float(jn), float(yn)
    return jn, yn


def hankel1(order: int, x):
    """Hankel function of the first kind ``J_n(x) + i Y_n(x)``."""
    jn, yn = bessel_jy(order, x)
    return jn + 1j * yn


def hankel1_orders(nmax: int, x):
    jj, yy = bessel_jy_orders(nmax, x)
    return jj + 1j * yy


def hankel1_derivative(order: int, x):
    """``H_n'(x) = H_{n-1}(x) - (n/x) H_n(x)`` with ``H_{-1} = -H_1``."""
    order = int(order)
    h = hankel1_orders(max(order, 1), x)
    if order == 0:
        return -h[1]
    return h[order - 1] - (order / np.asarray(x, dtype=float)) * h[order]


def hankel1_ratios(nmax: int, x):
    """``H_n(x) / H_{n-1}(x)`` for ``n = 1..nmax`` (index ``n - 1``).

    Forward recurrence on ratios, ``r_{n+1} = 2n/x - 1/r_n``. The Hankel
    function is dominated by ``Y_n`` past the turning point, so this
    direction is stable and never overflows, unlike the functions
    themselves. No order limit applies.
    """
    nmax = int(nmax)
    if nmax < 1:
        raise ValueError("need nmax >= 1")
    x = _as_positive_array(x)
    h0, h1 = hankel01(np.atleast_1d(x))
    out = np.empty((nmax,) + np.atleast_1d(x).shape, dtype=complex)
    out[0] = h1 / h0
    for n in range(1, nmax):
        out[n] = 2.0 * n / x - 1.0 / out[n - 1]
    return out.reshape((nmax,) + np.shape(x))


def hankel1_ratio_pair(order: int, x1, x2):
    """``H_n(x1) / H_n(x2)`` by products of consecutive-order ratios."""
    order = abs(int(order))
    h0a, _ = hankel01(np.atleast_1d(x1))
    h0b, _ = hankel01(np.atleast_1d(x2))
    out = h0a / h0b
    if order:
        ra = hankel1_ratios(order, np.atleast_1d(x1))
        rb = hankel1_ratios(order, np.atleast_1d(x2))
        out = out * np.prod(ra / rb, axis=0)
    return out[0] if np.ndim(x1) == 0 and np.ndim(x2) == 0 else out
