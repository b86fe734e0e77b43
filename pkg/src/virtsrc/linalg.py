"""Dense and iterative complex linear algebra used by the solver."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import _backend

logger = logging.getLogger(__name__)


class SingularSystemError(ZeroDivisionError):
    pass


class CyclicTridiagonal:
    """Periodic tridiagonal matrix with a Sherman-Morrison direct solver.

    ``A[i, i] = diag[i]``, ``A[i, i+1] = upper[i]``, ``A[i+1, i] = lower[i]``,
    ``A[0, N-1] = corners[0]`` and ``A[N-1, 0] = corners[1]``.
    The factorisation is computed once; :meth:`solve` accepts ``(N,)`` or
    ``(N, p)`` right-hand sides.
    """

    def __init__(self, diag, upper, lower, corners, pure: bool = False):
        self.diag = np.asarray(diag, dtype=complex)
        self.upper = np.asarray(upper, dtype=complex)
        self.lower = np.asarray(lower, dtype=complex)
        self.top_right, self.bottom_left = (complex(c) for c in corners)
        n = self.n = self.diag.shape[0]
        if n < 3:
            raise ValueError("cyclic tridiagonal systems need N >= 3")
        self._ops = _backend.get_ops(pure)
        scale = max(np.abs(self.diag).max(), np.abs(self.upper).max(), np.abs(self.lower).max(), 1e-300)
        self._tol = 1e-14 * scale

        gamma = -self.diag[0] if self.diag[0] != 0 else -scale
        self._gamma = gamma
        bb = self.diag.copy()
        bb[0] -= gamma
        bb[-1] -= self.bottom_left * self.top_right / gamma
        try:
            self._cp, self._den = self._ops.thomas_factor(self.lower, bb, self.upper, self._tol)
        except ZeroDivisionError as exc:
            raise SingularSystemError(str(exc)) from None
        u = np.zeros(n, dtype=complex)
        u[0] = gamma
        u[-1] = self.bottom_left
        self._z = self._thomas(u)
        self._denom = 1.0 + self._z[0] + self.top_right * self._z[-1] / gamma
        if abs(self._denom) < 1e-14:
            raise SingularSystemError("Sherman-Morrison update is singular")

    def _thomas(self, rhs):
        return self._ops.thomas_solve(self.lower, self._cp, self._den, rhs)

    def solve(self, rhs):
        rhs = np.asarray(rhs, dtype=complex)
        y = self._thomas(rhs)
        fact = (y[0] + self.top_right * y[-1] / self._gamma) / self._denom
        if y.ndim == 1:
            return y - fact * self._z
        return y - self._z[:, None] * fact[None, :]

    def matvec(self, x):
        x = np.asarray(x, dtype=complex)
        out = self.diag.reshape((-1,) + (1,) * (x.ndim - 1)) * x
        ext = (slice(None),) + (None,) * (x.ndim - 1)
        out[:-1] += self.upper[ext] * x[1:]
        out[1:] += self.lower[ext] * x[:-1]
        out[0] += self.top_right * x[-1]
        out[-1] += self.bottom_left * x[0]
        return out

    def dense(self):
        a = np.diag(self.diag) + np.diag(self.upper, 1) + np.diag(self.lower, -1)
        a[0, -1] += self.top_right
        a[-1, 0] += self.bottom_left
        return a


def solve_cyclic_tridiagonal(diag, upper, lower, corners, rhs, pure: bool = False):
    """One-shot solve of a periodic tridiagonal system (see :class:`CyclicTridiagonal`)."""
    return CyclicTridiagonal(diag, upper, lower, corners, pure=pure).solve(rhs)


@dataclass
class GmresReport:
    solution: np.ndarray
    residuals: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    tol: float = 0.0
    true_residual: float = float("nan")

    def iterations_to(self, tol: float):
        """First iteration whose relative residual is ``<= tol`` (None if never)."""
        for i, r in enumerate(self.residuals):
            if r <= tol:
                return i
        return None


def gmres(apply, rhs, tol: float = 1e-10, max_iter: int = 500, restart: int | None = None, x0=None):
    """GMRES with modified Gram-Schmidt Arnoldi and Givens rotations.

    ``apply`` maps a complex vector to a complex vector. ``residuals[i]`` is
    the relative residual ``||rhs - A x_i|| / ||rhs||`` after ``i`` Krylov
    steps (entry 0 is the initial guess). No restart unless ``restart`` is
    given.
    """
    b = np.asarray(rhs, dtype=complex)
    n = b.shape[0]
    bnorm = np.linalg.norm(b)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if bnorm == 0:
        raise ValueError("right-hand side is zero")
    x = np.zeros(n, dtype=complex) if x0 is None else np.array(x0, dtype=complex)
    m = max_iter if restart is None else min(restart, max_iter)
    residuals: list[float] = []
    total = 0
    converged = False

    while True:
        r = b - apply(x) if (x0 is not None or total > 0) else b.copy()
        beta = np.linalg.norm(r)
        if not residuals:
            residuals.append(beta / bnorm)
        if beta / bnorm <= tol:
            converged = True
            break
        V = np.zeros((m + 1, n), dtype=complex)
        H = np.zeros((m + 1, m), dtype=complex)
        cs = np.zeros(m, dtype=complex)
        sn = np.zeros(m, dtype=complex)
        g = np.zeros(m + 1, dtype=complex)
        g[0] = beta
        V[0] = r / beta
        j_done = 0
        for j in range(m):
            w = apply(V[j])
            for i in range(j + 1):
                H[i, j] = np.vdot(V[i], w)
                w = w - H[i, j] * V[i]
            H[j + 1, j] = np.linalg.norm(w)
            breakdown = abs(H[j + 1, j]) <= 1e-14 * beta
            if not breakdown:
                V[j + 1] = w / H[j + 1, j]
            for i in range(j):
                tmp = np.conj(cs[i]) * H[i, j] + np.conj(sn[i]) * H[i + 1, j]
                H[i + 1, j] = -sn[i] * H[i, j] + cs[i] * H[i + 1, j]
                H[i, j] = tmp
            a, c = H[j, j], H[j + 1, j]
            denom = np.hypot(abs(a), abs(c))
            if denom == 0:
                cs[j], sn[j] = 1.0, 0.0
            else:
                cs[j] = a / denom
                sn[j] = c / denom
            H[j, j] = np.conj(cs[j]) * a + np.conj(sn[j]) * c
            H[j + 1, j] = 0.0
            g[j + 1] = -sn[j] * g[j]
            g[j] = np.conj(cs[j]) * g[j]
            total += 1
            j_done = j + 1
            residuals.append(abs(g[j + 1]) / bnorm)
            if residuals[-1] <= tol or breakdown or total >= max_iter:
                break
        y = np.linalg.solve(np.triu(H[:j_done, :j_done]), g[:j_done]) if j_done else np.zeros(0)
        x = x + V[:j_done].T @ y
        if residuals[-1] <= tol or breakdown:
            converged = True
            break
        if total >= max_iter:
            break
        x0 = x

    true_res = np.linalg.norm(b - apply(x)) / bnorm
    if not converged:
        logger.info("GMRES stopped after %d iterations at residual %.3e", total, residuals[-1])
    return GmresReport(x, residuals, total, converged, tol, float(true_res))


def _householder_hessenberg(a):
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    for k in range(n - 2):
        x = a[k + 1 :, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        a[k + 1 :, k:] -= 2.0 * np.outer(v, v.conj() @ a[k + 1 :, k:])
        a[:, k + 1 :] -= 2.0 * np.outer(a[:, k + 1 :] @ v, v.conj())
        a[k + 2 :, k] = 0.0
    return a


def _givens(a, b):
    r = np.hypot(abs(a), abs(b))
    if r == 0:
        return 1.0, 0.0
    return a / r, b / r


def hessenberg_qr_eigenvalues(matrix, max_sweeps_per_eig: int = 60):
    """Eigenvalues by Householder Hessenberg reduction and Wilkinson-shifted QR."""
    h = _householder_hessenberg(matrix)
    n = h.shape[0]
    eigs = np.zeros(n, dtype=complex)
    hi = n - 1
    sweeps = 0
    norm = max(np.abs(h).max(), 1e-300)
    while hi >= 0:
        if hi == 0:
            eigs[0] = h[0, 0]
            break
        # deflate at the bottom
        lo = hi
        while lo > 0 and abs(h[lo, lo - 1]) > 1e-15 * (abs(h[lo, lo]) + abs(h[lo - 1, lo - 1]) + 1e-30 * norm):
            lo -= 1
        if lo == hi:
            eigs[hi] = h[hi, hi]
            if hi > 0:
                h[hi, hi - 1] = 0.0
            hi -= 1
            sweeps = 0
            continue
        if lo > 0:
            h[lo, lo - 1] = 0.0
        sweeps += 1
        if sweeps > max_sweeps_per_eig:
            raise np.linalg.LinAlgError("QR iteration did not converge")
        # Wilkinson shift from the trailing 2x2 block
        a, b, c, d = h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi]
        tr, det = a + d, a * d - b * c
        disc = np.sqrt(tr * tr / 4.0 - det)
        mu1, mu2 = tr / 2.0 + disc, tr / 2.0 - disc
        mu = mu1 if abs(mu1 - d) < abs(mu2 - d) else mu2
        if sweeps % 11 == 0:
            mu = mu + abs(h[hi, hi - 1])  # exceptional shift
        # one implicit QR step on the active block h[lo:hi+1, lo:hi+1] via Givens
        rots = []
        for i in range(lo, hi + 1):
            h[i, i] -= mu
        for i in range(lo, hi):
            cg, sg = _givens(h[i, i], h[i + 1, i])
            rots.append((cg, sg))
            rows = h[[i, i + 1], i:]
            h[i, i:] = np.conj(cg) * rows[0] + np.conj(sg) * rows[1]
            h[i + 1, i:] = -sg * rows[0] + cg * rows[1]
        for idx, i in enumerate(range(lo, hi)):
            cg, sg = rots[idx]
            cols = h[: hi + 1, [i, i + 1]]
            h[: hi + 1, i] = cols[:, 0] * cg + cols[:, 1] * sg
            h[: hi + 1, i + 1] = -cols[:, 0] * np.conj(sg) + cols[:, 1] * np.conj(cg)
        for i in range(lo, hi + 1):
            h[i, i] += mu
    return eigs


def eigenvalues_dense(matrix, method: str = "lapack"):
    """All eigenvalues of a square complex matrix.

    ``method="lapack"`` calls the library Hessenberg/QR driver;
    ``method="qr"`` runs :func:`hessenberg_qr_eigenvalues`.
    """
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if a.shape[0] > 4096:
        raise ValueError("dense eigenvalue problems are limited to N <= 4096")
    if method == "lapack":
        return np.linalg.eigvals(a.astype(complex))
    if method == "qr":
        return hessenberg_qr_eigenvalues(a)
    raise ValueError(f"unknown method {method!r}")


def condition_number(eigs) -> float:
    """Spectral condition number ``max|lambda| / min|lambda|``."""
    mags = np.abs(np.asarray(eigs))
    if mags.size == 0:
        raise ValueError("empty spectrum")
    if mags.min() == 0:
        return float("inf")
    return float(mags.max() / mags.min())


def singular_condition_number(matrix) -> float:
    """Ratio of extreme singular values (diagnostic only)."""
    s = np.linalg.svd(np.asarray(matrix), compute_uv=False)
    return float(s[0] / s[-1]) if s[-1] > 0 else float("inf")
