# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: order-0/1 Hankel functions, kernel matrices, Thomas solves.

Same algorithms as the numpy fallbacks in ``_purepy``; results agree to
rounding.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, log, cos, sin, cbrt, fabs, M_PI

cnp.import_array()

cdef double EULER_GAMMA = 0.57721566490153286061
cdef double ASYMPTOTIC_THRESHOLD = 25.0
cdef double RESCALE = 1e250


cdef enum:
    TABLE_SIZE = 128

# per-order weights of the Miller accumulators (see specfun._miller)
cdef double NORM_W[TABLE_SIZE]
cdef double S0_W[TABLE_SIZE]
cdef double S1_W[TABLE_SIZE]


cdef void _init_tables() noexcept:
    cdef int j, kk, kp, km
    cdef double coef
    for j in range(TABLE_SIZE):
        NORM_W[j] = 0.0
        S0_W[j] = 0.0
        S1_W[j] = 0.0
        if j == 0:
            continue
        if j % 2 == 0:
            kk = j // 2
            NORM_W[j] = 2.0
            S0_W[j] = (-1.0 if kk % 2 else 1.0) / kk
        else:
            kp = (j + 1) // 2
            coef = (-1.0 if kp % 2 else 1.0) / kp
            if j >= 3:
                km = (j - 1) // 2
                coef -= (-1.0 if km % 2 else 1.0) / km
            S1_W[j] = coef


_init_tables()


cdef inline void _hankel01_scalar(double x, double complex* h0, double complex* h1) noexcept nogil:
    cdef int m, j, k
    cdef double f_next, f_cur, f_prev, norm, s0, s1, lg, j0, j1, y0, y1, f1, tox
    cdef double complex term0, term1, ser0, ser1, ix, phase, pref
    if x < ASYMPTOTIC_THRESHOLD:
        m = <int>(x + 10.0 * cbrt(x) + 20.0)
        m += m % 2
        tox = 2.0 / x
        f_next = 0.0
        f_cur = 1e-30
        norm = 0.0
        s0 = 0.0
        s1 = 0.0
        f1 = 0.0
        j = m
        while j > 0:
            norm += NORM_W[j] * f_cur
            s0 += S0_W[j] * f_cur
            s1 += S1_W[j] * f_cur
            if j == 1:
                f1 = f_cur
            f_prev = (j * tox) * f_cur - f_next
            f_next = f_cur
            f_cur = f_prev
            if fabs(f_cur) > RESCALE:
                f_cur /= RESCALE
                f_next /= RESCALE
                norm /= RESCALE
                s0 /= RESCALE
                s1 /= RESCALE
                f1 /= RESCALE
            j -= 1
        norm += f_cur
        j0 = f_cur / norm
        j1 = f1 / norm
        lg = log(0.5 * x) + EULER_GAMMA
        y0 = (2.0 / M_PI) * (lg * j0 - 2.0 * s0 / norm)
        y1 = (2.0 / M_PI) * (-j0 / x + lg * j1 + s1 / norm)
        h0[0] = j0 + 1j * y0
        h1[0] = j1 + 1j * y1
        return
    ix = 1j / x
    ser0 = 1.0
    ser1 = 1.0
    term0 = 1.0
    term1 = 1.0
    for k in range(1, 31):
        term0 = term0 * ((0.0 - (2 * k - 1) * (2 * k - 1)) / (8.0 * k)) * ix
        term1 = term1 * ((4.0 - (2 * k - 1) * (2 * k - 1)) / (8.0 * k)) * ix
        ser0 = ser0 + term0
        ser1 = ser1 + term1
        if fabs(term0.real) + fabs(term0.imag) + fabs(term1.real) + fabs(term1.imag) < 1e-18:
            break
    pref = sqrt(2.0 / (M_PI * x))
    phase = (cos(x) + 1j * sin(x)) * ((1.0 - 1j) / sqrt(2.0))
    h0[0] = pref * phase * ser0
    h1[0] = pref * phase * (-1j) * ser1


def hankel01(const double[::1] x):
    cdef Py_ssize_t n = x.shape[0], i
    out0 = np.empty(n, dtype=np.complex128)
    out1 = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] o0 = out0
    cdef double complex[::1] o1 = out1
    with nogil:
        for i in range(n):
            _hankel01_scalar(x[i], &o0[i], &o1[i])
    return out0, out1


def kernel_matrices(const double[:, ::1] targets, const double[:, ::1] sources,
                    const double[:, ::1] normals, double k):
    """Single- and double-layer kernels ``(K_S, K_D)`` of shape (M, N)."""
    cdef Py_ssize_t m = targets.shape[0], n = sources.shape[0], i, j
    ks = np.empty((m, n), dtype=np.complex128)
    kd = np.empty((m, n), dtype=np.complex128)
    cdef double complex[:, ::1] vks = ks
    cdef double complex[:, ::1] vkd = kd
    cdef double dx, dy, r
    cdef double complex a, b
    cdef double complex quarter_i = 0.25j
    cdef double complex quarter_ik = 0.25j * k
    cdef int bad = 0
    with nogil:
        for i in range(m):
            for j in range(n):
                dx = targets[i, 0] - sources[j, 0]
                dy = targets[i, 1] - sources[j, 1]
                r = sqrt(dx * dx + dy * dy)
                if r < 1e-14:
                    bad = 1
                    vks[i, j] = 0
                    vkd[i, j] = 0
                    continue
                _hankel01_scalar(k * r, &a, &b)
                vks[i, j] = quarter_i * a
                vkd[i, j] = quarter_ik * b * ((normals[j, 0] * dx + normals[j, 1] * dy) / r)
    if bad:
        raise ValueError("target coincides with a virtual source")
    return ks, kd


def thomas_factor(const double complex[::1] lower, const double complex[::1] diag,
                  const double complex[::1] upper, double tol):
    """Forward-elimination coefficients of a tridiagonal matrix."""
    cdef Py_ssize_t n = diag.shape[0], i
    cp = np.zeros(n, dtype=np.complex128)
    den = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] vcp = cp
    cdef double complex[::1] vden = den
    cdef double complex d
    d = diag[0]
    if abs(d) < tol:
        raise ZeroDivisionError("tridiagonal pivot below tolerance")
    vden[0] = d
    for i in range(1, n):
        vcp[i - 1] = upper[i - 1] / vden[i - 1]
        d = diag[i] - lower[i - 1] * vcp[i - 1]
        if abs(d) < tol:
            raise ZeroDivisionError("tridiagonal pivot below tolerance")
        vden[i] = d
    return cp, den


def thomas_solve(const double complex[::1] lower, const double complex[::1] cp,
                 const double complex[::1] den, rhs):
    """Solve with precomputed coefficients; ``rhs`` is (N,) or (N, p)."""
    b = np.ascontiguousarray(rhs, dtype=np.complex128)
    one = b.ndim == 1
    if one:
        b = b.reshape(-1, 1)
    out = b.copy()
    cdef double complex[:, ::1] y = out
    cdef Py_ssize_t n = y.shape[0], p = y.shape[1], i, c
    with nogil:
        for c in range(p):
            y[0, c] = y[0, c] / den[0]
        for i in range(1, n):
            for c in range(p):
                y[i, c] = (y[i, c] - lower[i - 1] * y[i - 1, c]) / den[i]
        for i in range(n - 2, -1, -1):
            for c in range(p):
                y[i, c] = y[i, c] - cp[i] * y[i + 1, c]
    return out[:, 0] if one else out
