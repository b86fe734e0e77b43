"""Closed parametric boundary curves, meshing and the inward parallel shift."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
# reference rule for the number of nodes (see build_mesh)
NODE_RULES = ("arclength", "parameter")


class GeometryError(ValueError):
    """Raised for degenerate curves or an inadmissible source displacement."""


@dataclass(frozen=True)
class BoundaryCurve:
    """Closed curve given by trigonometric polynomials in ``t`` on ``[0, 2pi)``.

    ``x(t) = sum_j xc[j] cos(j t) + xs[j] sin(j t)`` and likewise for ``y``.
    Counterclockwise orientation is assumed so that the outward normal is the
    unit tangent rotated by ``-pi/2``.
    """

    xc: np.ndarray
    xs: np.ndarray
    yc: np.ndarray
    ys: np.ndarray
    kind: str = "fourier"
    radius: float | None = None

    def _eval(self, t, deriv):
        t = np.asarray(t, dtype=float)
        out = []
        for cos_c, sin_c in ((self.xc, self.xs), (self.yc, self.ys)):
            val = np.zeros_like(t)
            for j in range(len(cos_c)):
                c, s = cos_c[j], sin_c[j]
                if c == 0.0 and s == 0.0:
                    continue
                if deriv == 0:
                    val = val + c * np.cos(j * t) + s * np.sin(j * t)
                elif deriv == 1:
                    val = val + j * (-c * np.sin(j * t) + s * np.cos(j * t))
                else:
                    val = val - j * j * (c * np.cos(j * t) + s * np.sin(j * t))
            out.append(val)
        return np.stack(out, axis=-1)

    def position(self, t):
        return self._eval(t, 0)

    def first_derivative(self, t):
        return self._eval(t, 1)

    def second_derivative(self, t):
        return self._eval(t, 2)

    def length(self, samples: int = 4096) -> float:
        """Arclength by the periodic trapezoid rule (spectrally accurate)."""
        t = np.arange(samples) * (TWO_PI / samples)
        return float(np.sum(np.linalg.norm(self.first_derivative(t), axis=-1)) * TWO_PI / samples)

    def curvature_range(self, samples: int = 4096) -> tuple[float, float]:
        t = np.arange(samples) * (TWO_PI / samples)
        kappa = curve_eval(self, t)[3]
        return float(kappa.min()), float(kappa.max())


def _padded(coeffs, size):
    out = np.zeros(size)
    out[: len(coeffs)] = coeffs
    return out


def fourier_curve(xc, xs, yc, ys, kind="fourier", radius=None) -> BoundaryCurve:
    size = max(len(xc), len(xs), len(yc), len(ys))
    curve = BoundaryCurve(
        _padded(xc, size), _padded(xs, size), _padded(yc, size), _padded(ys, size), kind, radius
    )
    t = np.linspace(0.0, TWO_PI, 2048, endpoint=False)
    speed = np.linalg.norm(curve.first_derivative(t), axis=-1)
    if speed.min() < 1e-12:
        raise GeometryError("curve is not regular (vanishing tangent)")
    return curve


def flower() -> BoundaryCurve:
    """``x = (1 + 0.2 cos 2t) cos t``, ``y = (1 + 0.9 cos 2t) sin t``."""
    # product-to-sum form of the two factors
    return fourier_curve([0, 1.1, 0, 0.1], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0.55, 0, 0.45], kind="flower")


def circle(radius: float = 1.0) -> BoundaryCurve:
    if radius <= 0:
        raise GeometryError("circle radius must be positive")
    return fourier_curve([0, radius], [0, 0], [0, 0], [0, radius], kind="circle", radius=float(radius))


def parse_curve_file(path) -> BoundaryCurve:
    """Read a curve from a small text format.

    One line per coefficient list, e.g.::

        # x(t) = sum xc_j cos(jt) + xs_j sin(jt)
        xc: 0 1.1 0 0.1
        xs: 0
        yc: 0
        ys: 0 0.55 0 0.45
    """
    coeffs = {"xc": [0.0], "xs": [0.0], "yc": [0.0], "ys": [0.0]}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(":")
        key = key.strip()
        if key not in coeffs:
            raise GeometryError(f"unknown coefficient list {key!r} in {path}")
        coeffs[key] = [float(v) for v in rest.replace(",", " ").split()]
    return fourier_curve(coeffs["xc"], coeffs["xs"], coeffs["yc"], coeffs["ys"])


def parse_geometry(text: str) -> BoundaryCurve:
    """``flower``, ``circle:R`` or ``file:PATH``."""
    if text == "flower":
        return flower()
    if text.startswith("circle"):
        _, _, radius = text.partition(":")
        return circle(float(radius) if radius else 1.0)
    if text.startswith("file:"):
        return parse_curve_file(text[5:])
    raise GeometryError(f"unknown geometry {text!r}")


def curve_eval(curve: BoundaryCurve, t):
    """Point, unit tangent, outward unit normal and signed curvature at ``t``."""
    d1 = curve.first_derivative(t)
    d2 = curve.second_derivative(t)
    speed = np.linalg.norm(d1, axis=-1)
    if np.any(speed < 1e-12):
        raise GeometryError("degenerate tangent")
    tangent = d1 / speed[..., None]
    normal = np.stack([tangent[..., 1], -tangent[..., 0]], axis=-1)
    kappa = (d1[..., 0] * d2[..., 1] - d1[..., 1] * d2[..., 0]) / speed**3
    return curve.position(t), tangent, normal, kappa


def displacement_h(wavelength: float, nlambda: float, beta: float, const: float = 1.0) -> float:
    """Virtual-source displacement ``const * wavelength / nlambda**beta``."""
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    return const * wavelength / nlambda**beta


def base_constant(beta: float, base_nlambda: float = 12.0, base_ratio: float = 12.0) -> float:
    """Constant making ``displacement_h(lam, base_nlambda, beta)`` equal ``lam / base_ratio``."""
    return base_nlambda**beta / base_ratio


def surface_element_factor(kappa, h: float):
    """Arclength ratio ``1 - h kappa`` between the parallel curve and the boundary."""
    factor = 1.0 - h * np.asarray(kappa, dtype=float)
    if np.any(factor <= 0):
        raise GeometryError("parallel curve folds over (1 - h*kappa <= 0)")
    return factor


def node_count(curve: BoundaryCurve, k: float, nlambda: float, rule: str = "parameter") -> int:
    """Number of nodes for ``nlambda`` elements per wavelength.

    ``parameter`` (default): ``ceil(nlambda * 2pi / lambda)``, i.e. the
    wavelength is counted against the parameter length ``2pi``. Equal to the
    arclength rule on the unit circle; on the flower it gives 151, 302, 604,
    1207 for ``k = 4pi .. 32pi`` at ``nlambda = 12``.
    ``arclength``: ``ceil(nlambda |Gamma| / lambda)``.
    """
    wavelength = TWO_PI / k
    if rule == "arclength":
        return int(math.ceil(nlambda * curve.length() / wavelength - 1e-9))
    if rule == "parameter":
        return int(math.ceil(nlambda * TWO_PI / wavelength - 1e-9))
    raise ValueError(f"unknown node rule {rule!r}; expected one of {NODE_RULES}")


def winding_number(polygon: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Winding number of a closed polygon around each point."""
    points = np.atleast_2d(points)
    a = polygon[None, :, :] - points[:, None, :]
    b = np.roll(polygon, -1, axis=0)[None, :, :] - points[:, None, :]
    cross = a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
    dot = np.sum(a * b, axis=-1)
    return np.rint(np.sum(np.arctan2(cross, dot), axis=1) / TWO_PI).astype(int)


def inside(curve: BoundaryCurve, points, samples: int = 4096) -> np.ndarray:
    """Winding number of a fine polygonal approximation of ``curve`` around ``points``."""
    t = np.arange(samples) * (TWO_PI / samples)
    return winding_number(curve.position(t), np.asarray(points, dtype=float))


def polygon_self_intersects(polygon: np.ndarray) -> bool:
    """True if two non-adjacent edges of the closed polygon cross."""
    n = len(polygon)
    p = polygon
    q = np.roll(polygon, -1, axis=0)

    def orient(a, b, c):
        return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])

    for i in range(n):
        # edges j > i + 1, excluding the wrap-around neighbour of edge 0
        j = np.arange(i + 2, n if i > 0 else n - 1)
        if j.size == 0:
            continue
        o1 = orient(p[i], q[i], p[j])
        o2 = orient(p[i], q[i], q[j])
        o3 = orient(p[j], q[j], p[i][None, :])
        o4 = orient(p[j], q[j], q[i][None, :])
        if np.any((o1 * o2 < 0) & (o3 * o4 < 0)):
            return True
    return False


@dataclass(frozen=True)
class Mesh:
    """Nyström nodes on the boundary together with their virtual sources."""

    curve: BoundaryCurve
    k: float
    nlambda: float
    h: float
    t: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    normals: np.ndarray
    curvature: np.ndarray
    sources: np.ndarray
    element_ratio: float = field(default=1.0)

    @property
    def n(self) -> int:
        return len(self.t)

    @property
    def wavelength(self) -> float:
        return TWO_PI / self.k

    @property
    def length(self) -> float:
        return float(self.weights.sum())

    def gaps(self) -> np.ndarray:
        """Chord lengths between consecutive nodes (wrap-around included)."""
        return np.linalg.norm(np.roll(self.nodes, -1, axis=0) - self.nodes, axis=1)

    def element_lengths(self, refine: int = 16) -> np.ndarray:
        """Arclength between consecutive nodes, by composite Gauss-Legendre on each gap."""
        xg, wg = np.polynomial.legendre.leggauss(refine)
        dt = TWO_PI / self.n
        tt = self.t[:, None] + 0.5 * dt * (xg[None, :] + 1.0)
        speed = np.linalg.norm(self.curve.first_derivative(tt), axis=-1)
        return 0.5 * dt * speed @ wg

    def parallel_points(self, distance: float, count: int | None = None) -> np.ndarray:
        """Points at signed normal ``distance`` from the curve (positive = outward)."""
        count = self.n if count is None else count
        t = np.arange(count) * (TWO_PI / count)
        pts, _, nrm, _ = curve_eval(self.curve, t)
        return pts + distance * nrm

    def with_h(self, h: float) -> "Mesh":
        return build_mesh(self.curve, self.k, self.nlambda, h, n=self.n)


def build_mesh(
    curve: BoundaryCurve,
    k: float,
    nlambda: float,
    h: float,
    node_rule: str = "parameter",
    n: int | None = None,
) -> Mesh:
    """Uniform-in-parameter nodes with periodic trapezoid weights.

    Parameters
    ----------
    curve : BoundaryCurve
    k : float
        Wavenumber.
    nlambda : float
        Elements per wavelength.
    h : float
        Inward displacement of the virtual sources.
    node_rule : {"arclength", "parameter"}
        How the node count follows from ``nlambda`` (see :func:`node_count`).
    n : int, optional
        Explicit node count overriding ``node_rule``.
    """
    if k <= 0:
        raise ValueError("wavenumber must be positive")
    if nlambda < 2 and n is None:
        raise ValueError("need at least 2 elements per wavelength")
    if h < 0:
        raise GeometryError("displacement h must be nonnegative")
    kmin, kmax = curve.curvature_range()
    if h > 0 and h * max(abs(kmin), abs(kmax)) >= 1.0:
        raise GeometryError(f"h = {h:g} is not below 1/max|kappa| = {1.0 / max(abs(kmin), abs(kmax)):g}")
    count = node_count(curve, k, nlambda, node_rule) if n is None else int(n)
    if count < 3:
        raise ValueError("need at least 3 nodes")
    dt = TWO_PI / count
    t = np.arange(count) * dt
    pts, _, nrm, kappa = curve_eval(curve, t)
    speed = np.linalg.norm(curve.first_derivative(t), axis=-1)
    weights = speed * dt
    sources = pts - h * nrm
    surface_element_factor(kappa, h)
    if h > 0:
        if np.any(inside(curve, sources) == 0):
            raise GeometryError("a virtual source lies outside the boundary")
        if polygon_self_intersects(sources):
            raise GeometryError("the shifted source polygon self-intersects")
    ratio = float(speed.max() / speed.min())
    if ratio > 5.0:
        logger.warning("element lengths vary by a factor %.1f (> 5)", ratio)
    return Mesh(curve, float(k), float(nlambda), float(h), t, pts, weights, nrm, kappa, sources, ratio)
