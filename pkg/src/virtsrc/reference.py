"""Analytic solutions used as ground truth.

* a radiating field made of four point sources inside the obstacle,
* plane-wave scattering by a sound-soft circle (separation of variables),
* modal eigenvalues of the virtual-source operator and of the exterior
  Dirichlet-to-Neumann map on a circle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import BoundaryCurve, inside
from .kernels import phi_2d
from .specfun import MAX_ORDER, bessel_jy_orders, hankel01, hankel1_ratio_pair, hankel1_ratios

MANUFACTURED_SOURCES = np.array([[0.75, -0.5], [0.75, 0.5], [-0.75, 0.5], [-0.75, -0.5]])


@dataclass(frozen=True)
class ManufacturedField:
    """``F(x) = sum_j Phi(x, y_j)`` for point sources ``y_j`` inside the obstacle."""

    k: float
    sources: np.ndarray = field(default_factory=lambda: MANUFACTURED_SOURCES.copy())

    def __call__(self, x):
        return manufactured_field(self.k, x, self.sources)

    def check_inside(self, curve: BoundaryCurve) -> None:
        """Raise ``ValueError`` unless every source is enclosed by ``curve``."""
        if np.any(inside(curve, self.sources) == 0):
            raise ValueError("manufactured sources must lie strictly inside the boundary")


def manufactured_field(k: float, x, sources=None):
    """Sum of fundamental solutions centred at ``sources`` (default: the four-point layout).

    Raises ``ValueError`` if ``x`` coincides with a source.
    """
    src = MANUFACTURED_SOURCES if sources is None else np.asarray(sources, dtype=float)
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape[:-1], dtype=complex)
    for y in src:
        out = out + phi_2d(k, x, y)
    return out


def _polar(x):
    x = np.asarray(x, dtype=float)
    return np.hypot(x[..., 0], x[..., 1]), np.arctan2(x[..., 1], x[..., 0])


def _neumann_factors(nmax):
    eps = np.full(nmax + 1, 2.0)
    eps[0] = 1.0
    return eps * (1j) ** np.arange(nmax + 1)


def mie_truncation(k: float, radius: float) -> int:
    return int(math.ceil(k * radius)) + 40


def jacobi_anger(k: float, x, nmax: int | None = None):
    """Partial sum of ``exp(i k r cos(theta)) = sum_n eps_n i^n J_n(kr) cos(n theta)``."""
    r, theta = _polar(x)
    kr = k * np.atleast_1d(r)
    nmax = mie_truncation(float(kr.max()), 1.0) if nmax is None else nmax
    jj, _ = bessel_jy_orders(nmax, kr)
    coef = _neumann_factors(nmax)
    orders = np.arange(nmax + 1)
    cosines = np.cos(orders[:, None] * np.atleast_1d(theta)[None, :])
    out = np.einsum("n,nm,nm->m", coef, jj, cosines)
    return out.reshape(np.shape(r)) if np.ndim(r) else out[0]


@dataclass
class MieResult:
    scattered: np.ndarray
    total: np.ndarray
    nmax: int
    tail: float


def mie_soft_circle(k: float, radius: float, x, nmax: int | None = None, full: bool = False):
    """Plane wave ``exp(ikx)`` scattered by a sound-soft circle centred at the origin.

    ``u_sc = -sum_n eps_n i^n J_n(kR)/H_n(kR) H_n(kr) cos(n theta)`` truncated at
    ``ceil(kR) + 40``.

    Returns
    -------
    (u_scattered, u_total), or a :class:`MieResult` with the magnitude of the
    last retained term as tail estimate when ``full`` is true.

    Raises
    ------
    ValueError
        If a point lies inside the circle or ``kR`` needs orders above 200.
    ArithmeticError
        If the last retained terms are not small compared with the largest one.
    """
    if radius <= 0 or k <= 0:
        raise ValueError("radius and wavenumber must be positive")
    r, theta = _polar(x)
    r1 = np.atleast_1d(r)
    th1 = np.atleast_1d(theta)
    if np.any(r1 < radius * (1.0 - 1e-12)):
        raise ValueError("evaluation point inside the scatterer")
    kR = k * radius
    nmax = mie_truncation(k, radius) if nmax is None else int(nmax)
    if nmax > MAX_ORDER:
        raise ValueError(f"kR = {kR:g} needs more than {MAX_ORDER} terms")

    jj, _ = bessel_jy_orders(nmax, kR)
    # H_n(kr)/H_n(kR) as running products of consecutive-order ratios
    h0r, _ = hankel01(k * r1)
    h0R, _ = hankel01(np.array([kR]))
    ratio = np.empty((nmax + 1, r1.size), dtype=complex)
    ratio[0] = h0r / h0R[0]
    if nmax:
        ratio[1:] = ratio[0] * np.cumprod(hankel1_ratios(nmax, k * r1) / hankel1_ratios(nmax, kR)[:, None], axis=0)
    terms = (_neumann_factors(nmax) * jj)[:, None] * ratio * np.cos(np.arange(nmax + 1)[:, None] * th1[None, :])
    mags = np.abs(terms).max(axis=1)
    tail = float(mags[-3:].max())
    if tail > 1e-8 * max(float(mags.max()), 1e-300):
        raise ArithmeticError("Mie series has not converged at the truncation order")
    u_sc = -terms.sum(axis=0)
    u_tot = np.exp(1j * k * r1 * np.cos(th1)) + u_sc
    if np.ndim(r) == 0:
        u_sc, u_tot = u_sc[0], u_tot[0]
    else:
        u_sc, u_tot = u_sc.reshape(np.shape(r)), u_tot.reshape(np.shape(r))
    if full:
        return MieResult(u_sc, u_tot, nmax, tail)
    return u_sc, u_tot


def circle_virtual_source_eigenvalue(k: float, a: float, h: float, n):
    """``H_|n|(ka) / H_|n|(k(a-h))``: modal eigenvalue of the virtual-source operator with exact DtN."""
    if not 0 < h < a:
        raise ValueError("need 0 < h < a")
    ns = np.atleast_1d(np.abs(np.asarray(n, dtype=int)))
    out = np.array([hankel1_ratio_pair(int(m), k * a, k * (a - h)) for m in ns])
    return out[0] if np.ndim(n) == 0 else out.reshape(np.shape(n))


def circle_dtn_symbols(k: float, a: float, nmax: int) -> np.ndarray:
    """``gamma_n = k H_n'(ka) / H_n(ka)`` for ``n = 0..nmax``."""
    if a <= 0 or k <= 0:
        raise ValueError("radius and wavenumber must be positive")
    x = k * a
    h0, h1 = hankel01(np.array([x]))
    out = np.empty(nmax + 1, dtype=complex)
    out[0] = -k * h1[0] / h0[0]
    if nmax:
        # H_n' = H_{n-1} - (n/x) H_n
        ratios = hankel1_ratios(nmax, x)
        n = np.arange(1, nmax + 1)
        out[1:] = k * (1.0 / ratios - n / x)
    return out


def circle_exact_dtn_eigenvalue(k: float, a: float, n):
    """Exterior Dirichlet-to-Neumann eigenvalue of Fourier mode ``n`` on a circle of radius ``a``."""
    ns = np.abs(np.asarray(n, dtype=int))
    table = circle_dtn_symbols(k, a, int(np.max(ns)) if ns.size else 0)
    out = table[ns]
    return complex(out) if np.ndim(n) == 0 else out
