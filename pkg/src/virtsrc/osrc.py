"""On-surface radiation operator: rotated Padé square root on a periodic P1 mesh."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Mesh
from .linalg import CyclicTridiagonal, SingularSystemError

DEFAULT_TERMS = 4
DEFAULT_ANGLE = math.pi / 2


@dataclass(frozen=True)
class PadeCoefficients:
    """``P(z) = a0 + sum_m a[m] / (z - b[m])``, rotated by ``theta``."""

    terms: int
    theta: float
    a0: complex
    a: np.ndarray
    b: np.ndarray

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self.a0, dtype=complex)
        for am, bm in zip(self.a, self.b):
            out = out + am / (z - bm)
        return out


def pade_sum_form(terms: int):
    """Weights ``A_j`` and ``B_j`` of ``sqrt(1+z) ~ 1 + sum A_j z / (1 + B_j z)``."""
    j = np.arange(1, terms + 1)
    angle = j * math.pi / (2 * terms + 1)
    return 2.0 / (2 * terms + 1) * np.sin(angle) ** 2, np.cos(angle) ** 2


def pade_base_coefficients(terms: int = DEFAULT_TERMS) -> PadeCoefficients:
    """Real partial-fraction coefficients of the ``[M/M]`` Padé approximant of ``sqrt(1+z)``."""
    if not 1 <= terms <= 16:
        raise ValueError("Padé order must lie in [1, 16]")
    big_a, big_b = pade_sum_form(terms)
    # A z / (1 + B z) = A/B - (A/B^2) / (z + 1/B)
    a0 = 1.0 + float(np.sum(big_a / big_b))
    return PadeCoefficients(terms, 0.0, a0, -big_a / big_b**2, -1.0 / big_b)


def rotate_pade(base: PadeCoefficients, theta: float) -> PadeCoefficients:
    """Rotate the branch cut of the approximant by ``theta``."""
    if base.theta != 0.0:
        raise ValueError("rotate_pade expects unrotated coefficients")
    if theta == 0.0:
        return base
    a0 = base.a0 * np.exp(0.5j * theta)
    a = base.a * np.exp(1.5j * theta)
    b = (1.0 + base.b) * np.exp(1j * theta) - 1.0
    return PadeCoefficients(base.terms, float(theta), complex(a0), a.astype(complex), b.astype(complex))


def pade(terms: int = DEFAULT_TERMS, theta: float = DEFAULT_ANGLE) -> PadeCoefficients:
    return rotate_pade(pade_base_coefficients(terms), theta)


@dataclass(frozen=True)
class PeriodicFem:
    """Cyclic P1 mass and stiffness matrices stored by diagonals.

    ``lengths[i]`` is the element from node ``i`` to node ``i+1`` (mod N).
    """

    lengths: np.ndarray

    @property
    def n(self) -> int:
        return len(self.lengths)

    def _diagonals(self, which):
        ell = self.lengths
        prev = np.roll(ell, 1)
        if which == "mass":
            return (prev + ell) / 3.0, ell / 6.0
        return 1.0 / prev + 1.0 / ell, -1.0 / ell

    def combination(self, stiff_coef, mass_coef, pure: bool = False) -> CyclicTridiagonal:
        """Factorised ``stiff_coef * K + mass_coef * M``."""
        dm, om = self._diagonals("mass")
        dk, ok = self._diagonals("stiffness")
        diag = stiff_coef * dk + mass_coef * dm
        off = stiff_coef * ok + mass_coef * om
        # off[i] couples nodes i and i+1; off[-1] is the wrap-around pair (N-1, 0)
        return CyclicTridiagonal(diag, off[:-1], off[:-1], (off[-1], off[-1]), pure=pure)

    def _apply(self, which, v):
        d, off = self._diagonals(which)
        v = np.asarray(v)
        ext = (slice(None),) + (None,) * (v.ndim - 1)
        return d[ext] * v + off[ext] * np.roll(v, -1, axis=0) + np.roll(off, 1)[ext] * np.roll(v, 1, axis=0)

    def mass_matvec(self, v):
        return self._apply("mass", v)

    def stiffness_matvec(self, v):
        return self._apply("stiffness", v)

    def _dense(self, which):
        d, off = self._diagonals(which)
        n = self.n
        a = np.diag(d)
        idx = np.arange(n)
        a[idx, (idx + 1) % n] += off
        a[(idx + 1) % n, idx] += off
        return a

    @property
    def mass(self) -> np.ndarray:
        return self._dense("mass")

    @property
    def stiffness(self) -> np.ndarray:
        return self._dense("stiffness")


def build_periodic_fem(mesh: Mesh) -> PeriodicFem:
    """P1 matrices with element lengths equal to the arclength between nodes."""
    if mesh.n < 3:
        raise ValueError("need at least 3 nodes")
    lengths = mesh.element_lengths()
    if np.any(lengths < 1e-12):
        raise ValueError("degenerate element (length < 1e-12)")
    return PeriodicFem(lengths)


class OsrcOperator:
    """``ik (a0 v + sum_m a_m w_m)`` with ``(-K/k_eps^2 - b_m M) w_m = M v``.

    The resolvent matrices are factorised once at construction.
    ``damping`` gives ``k_eps = k + i * damping * k^(1/3)``.
    """

    def __init__(self, fem: PeriodicFem, pade_coeffs: PadeCoefficients, k: float, damping: float = 0.0,
                 pure: bool = False):
        self.fem = fem
        self.pade = pade_coeffs
        self.k = float(k)
        self.k_eps = self.k + 1j * damping * self.k ** (1.0 / 3.0)
        self._solvers = []
        for bm in pade_coeffs.b:
            try:
                self._solvers.append(fem.combination(-1.0 / self.k_eps**2, -bm, pure=pure))
            except SingularSystemError as exc:
                raise SingularSystemError(f"OSRC resolvent for pole {bm} is singular: {exc}") from None

    @property
    def n(self) -> int:
        return self.fem.n

    def apply(self, v):
        v = np.asarray(v, dtype=complex)
        if v.shape[0] != self.n:
            raise ValueError(f"expected leading dimension {self.n}, got {v.shape[0]}")
        mv = self.fem.mass_matvec(v)
        acc = self.pade.a0 * v
        for am, solver in zip(self.pade.a, self._solvers):
            acc = acc + am * solver.solve(mv)
        return 1j * self.k * acc

    __call__ = apply

    def precondition(self, v, h: float):
        return np.asarray(v, dtype=complex) - h * self.apply(v)


def apply_osrc(fem: PeriodicFem, pade_coeffs: PadeCoefficients, k: float, v, damping: float = 0.0):
    return OsrcOperator(fem, pade_coeffs, k, damping).apply(v)


def apply_preconditioner(fem: PeriodicFem, pade_coeffs: PadeCoefficients, k: float, h: float, v,
                         damping: float = 0.0):
    """``v - h * Lambda_osrc v``."""
    return OsrcOperator(fem, pade_coeffs, k, damping).precondition(v, h)
