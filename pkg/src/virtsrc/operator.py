"""Discrete virtual-source operator, its OSRC-preconditioned form and field evaluation.

With nodes ``y_n``, weights ``alpha_n``, curvature ``kappa_n`` and sources
``z_n = y_n - h nu_n`` the operator collocated at ``x_m = y_m`` is::

    (A v)_m = sum_n alpha_n (1 - h kappa_n) [K_D(x_m, z_n) v_n - K_S(x_m, z_n) (Lambda v)_n]

and the preconditioner is ``B = I - h Lambda``.
"""
from __future__ import annotations

import copy
import logging

import numpy as np

from .geometry import Mesh, inside, surface_element_factor
from .kernels import kernel_matrices
from .osrc import DEFAULT_ANGLE, DEFAULT_TERMS, OsrcOperator, build_periodic_fem, pade
from .reference import circle_dtn_symbols

logger = logging.getLogger(__name__)

DENSE_LIMIT = 4096
_CHUNK_ROWS = 256


class VirtualSourceOperator:
    """Linear map ``v -> A v`` on densities sampled at the mesh nodes.

    Parameters
    ----------
    mesh : Mesh
        Nodes, weights, normals and shifted sources (``mesh.h`` is the displacement).
    pade_terms, pade_angle : int, float
        Rotated Padé approximant used by the on-surface radiation operator.
    damping : float
        Optional complexification ``k + i * damping * k^(1/3)`` of the OSRC wavenumber.
    matrix_free : bool
        Recompute kernels row-block by row-block on every apply instead of
        caching the two ``N x N`` matrices.
    pure : bool
        Use the numpy fallback instead of the compiled core.
    """

    def __init__(self, mesh: Mesh, pade_terms: int = DEFAULT_TERMS, pade_angle: float = DEFAULT_ANGLE,
                 damping: float = 0.0, matrix_free: bool = False, pure: bool = False):
        if mesh.h <= 0:
            raise ValueError("virtual sources need a positive displacement h")
        self.mesh = mesh
        self.k = mesh.k
        self.h = mesh.h
        self.pure = pure
        self.matrix_free = matrix_free
        self.scale = mesh.weights * surface_element_factor(mesh.curvature, mesh.h)
        self.fem = build_periodic_fem(mesh)
        self.osrc = OsrcOperator(self.fem, pade(pade_terms, pade_angle), self.k, damping, pure=pure)
        self.dtn_mode = "osrc"
        self._dtn = self.osrc.apply
        self._ks = self._kd = None
        if not matrix_free:
            self._ks, self._kd = self._scaled_kernels(mesh.nodes)

    @property
    def n(self) -> int:
        return self.mesh.n

    def _scaled_kernels(self, targets):
        ks, kd = kernel_matrices(self.k, targets, self.mesh.sources, self.mesh.normals, pure=self.pure)
        return ks * self.scale[None, :], kd * self.scale[None, :]

    def _check(self, v):
        v = np.asarray(v, dtype=complex)
        if v.shape[0] != self.n or v.ndim > 2:
            raise ValueError(f"density must have leading dimension {self.n}, got shape {v.shape}")
        return v

    def _combine(self, ks, kd, v, lam):
        return kd @ v - ks @ lam

    def _layer_sum(self, targets, v, lam, cached=None):
        if cached is not None:
            return self._combine(cached[0], cached[1], v, lam)
        out = np.empty((len(targets),) + v.shape[1:], dtype=complex)
        for start in range(0, len(targets), _CHUNK_ROWS):
            stop = start + _CHUNK_ROWS
            ks, kd = self._scaled_kernels(targets[start:stop])
            out[start:stop] = self._combine(ks, kd, v, lam)
        return out

    def apply_dtn(self, v):
        """The radiation operator currently in use (OSRC or exact circle map)."""
        return self._dtn(self._check(v))

    def apply_A(self, v):
        v = self._check(v)
        lam = self._dtn(v)
        cached = None if self._ks is None else (self._ks, self._kd)
        return self._layer_sum(self.mesh.nodes, v, lam, cached)

    def apply_B(self, v):
        v = self._check(v)
        return v - self.h * self._dtn(v)

    def apply_BA(self, v):
        return self.apply_B(self.apply_A(v))

    __call__ = apply_BA

    def evaluate_field(self, v, targets, check_outside: bool = True):
        """Field radiated by density ``v`` at exterior ``targets`` of shape ``(M, 2)``."""
        v = self._check(v)
        targets = np.atleast_2d(np.asarray(targets, dtype=float))
        if check_outside and np.any(inside(self.mesh.curve, targets) != 0):
            raise ValueError("evaluation target lies inside the boundary")
        return self._layer_sum(targets, v, self._dtn(v))

    def assemble_dense(self, which: str = "BA") -> np.ndarray:
        """Dense matrix whose column ``j`` is the operator applied to ``e_j``."""
        if self.n > DENSE_LIMIT:
            raise ValueError(f"dense assembly is limited to N <= {DENSE_LIMIT}")
        eye = np.eye(self.n, dtype=complex)
        if which == "A":
            return self.apply_A(eye)
        if which == "BA":
            return self.apply_BA(eye)
        if which == "B":
            return self.apply_B(eye)
        raise ValueError(f"unknown operator {which!r}; use 'A', 'BA' or 'B'")

    def swap_dtn(self, mode: str = "osrc", radius: float | None = None,
                 dtn_radius: float | None = None) -> "VirtualSourceOperator":
        """Copy of the operator with a different radiation operator.

        ``mode="exact-circle"`` multiplies the discrete Fourier coefficient of
        mode ``n`` by ``k H_n'(kb)/H_n(kb)``; it requires a circle of radius
        ``a`` centred at the origin with uniformly spaced nodes. ``b``
        (``dtn_radius``) defaults to ``a``, the map of the physical boundary;
        ``b = a - h`` gives the map of the source circle, for which the
        continuous operator is exactly diagonal with eigenvalues
        ``H_n(ka)/H_n(k(a-h))``. Kernel caches are shared.
        """
        new = copy.copy(self)
        if mode == "osrc":
            new._dtn = self.osrc.apply
            new.dtn_mode = "osrc"
            return new
        if mode != "exact-circle":
            raise ValueError(f"unknown DtN mode {mode!r}")
        curve = self.mesh.curve
        if curve.kind != "circle":
            raise ValueError("exact circle DtN requires a circular boundary")
        a = curve.radius if radius is None else float(radius)
        r = np.linalg.norm(self.mesh.nodes, axis=1)
        if not np.allclose(r, a, rtol=1e-10, atol=1e-12):
            raise ValueError(f"mesh nodes do not lie on a centred circle of radius {a:g}")
        n = self.n
        freqs = np.abs(np.fft.fftfreq(n, 1.0 / n)).astype(int)
        b = a if dtn_radius is None else float(dtn_radius)
        symbols = circle_dtn_symbols(self.k, b, int(freqs.max()))[freqs]

        def exact(v):
            ext = (slice(None),) + (None,) * (v.ndim - 1)
            return np.fft.ifft(symbols[ext] * np.fft.fft(v, axis=0), axis=0)

        new._dtn = exact
        new.dtn_mode = "exact-circle"
        return new


def apply_A(op: VirtualSourceOperator, v):
    return op.apply_A(v)


def apply_BA(op: VirtualSourceOperator, v):
    return op.apply_BA(v)


def evaluate_field(op: VirtualSourceOperator, v, targets):
    return op.evaluate_field(v, targets)


def assemble_dense(op: VirtualSourceOperator, which: str = "BA"):
    return op.assemble_dense(which)


def swap_dtn(op: VirtualSourceOperator, mode: str = "osrc", radius: float | None = None,
             dtn_radius: float | None = None):
    return op.swap_dtn(mode, radius, dtn_radius)


def modal_response(op: VirtualSourceOperator, orders, which: str = "A"):
    """Rayleigh quotients ``<e_n, T e_n> / <e_n, e_n>`` for Fourier modes ``e_n = exp(i n t)``."""
    t = op.mesh.t
    modes = np.exp(1j * np.outer(t, np.asarray(orders)))
    applied = {"A": op.apply_A, "BA": op.apply_BA, "B": op.apply_B}[which](modes)
    return np.einsum("ij,ij->j", modes.conj(), applied) / op.n


__all__ = [
    "VirtualSourceOperator",
    "apply_A",
    "apply_BA",
    "assemble_dense",
    "evaluate_field",
    "modal_response",
    "swap_dtn",
]
