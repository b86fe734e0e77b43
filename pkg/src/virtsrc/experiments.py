"""Experiment drivers: manufactured solution, plane-wave benchmark, spectra and refinement tables."""
from __future__ import annotations

import csv
import json
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .geometry import NODE_RULES, base_constant, build_mesh, displacement_h, parse_geometry
from .linalg import condition_number, eigenvalues_dense, gmres
from .operator import VirtualSourceOperator
from .reference import ManufacturedField, manufactured_field, mie_soft_circle

logger = logging.getLogger(__name__)

EXPERIMENT_KINDS = ("manufactured", "planewave", "spectrum", "table", "mie-compare")


@dataclass
class ExperimentConfig:
    """Parameters of one run.

    ``h`` overrides the rule ``h = h_const * lambda / nlambda**beta``; when
    ``h_const`` is left unset it is chosen so that ``h = lambda/12`` at
    ``nlambda = 12`` for every ``beta``.
    """

    geometry: str = "flower"
    k: float = 4 * math.pi
    nlambda: float = 12.0
    beta: float = 1.0
    h_const: float | None = None
    h: float | None = None
    pade_terms: int = 4
    pade_angle: float = math.pi / 2
    damping: float = 0.0
    tol: float = 1e-10
    max_iter: int = 500
    restart: int | None = None
    kind: str = "manufactured"
    out: str | None = None
    node_rule: str = "parameter"
    n: int | None = None
    probe_distance: float | None = None
    matrix_free: bool = False

    def __post_init__(self):
        for name in ("k", "nlambda", "tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must lie in [0, 1]")
        if self.h_const is not None and self.h_const <= 0:
            raise ValueError("h_const must be positive")
        if self.h is not None and self.h <= 0:
            raise ValueError("h must be positive")
        if self.max_iter < 1 or not 1 <= self.pade_terms <= 16:
            raise ValueError("max_iter must be >= 1 and pade_terms in [1, 16]")
        if self.kind not in EXPERIMENT_KINDS:
            raise ValueError(f"unknown experiment kind {self.kind!r}")
        if self.node_rule not in NODE_RULES:
            raise ValueError(f"unknown node rule {self.node_rule!r}")

    @property
    def wavelength(self) -> float:
        return 2 * math.pi / self.k

    @property
    def displacement(self) -> float:
        if self.h is not None:
            return self.h
        const = base_constant(self.beta) if self.h_const is None else self.h_const
        return displacement_h(self.wavelength, self.nlambda, self.beta, const)

    @property
    def probe_offset(self) -> float:
        return self.wavelength / 4 if self.probe_distance is None else self.probe_distance


@dataclass
class SolveReport:
    config: ExperimentConfig
    n: int
    h: float
    density: np.ndarray | None = None
    residuals: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    rel_error: float = float("nan")
    rel_error_sqrt: float = float("nan")
    boundary_residual: float = float("nan")
    cond: float = float("nan")
    eigenvalues: np.ndarray | None = None
    timings: dict = field(default_factory=dict)

    def summary(self) -> dict:
        """Scalar results as a flat dict (one CSV row)."""
        out = {
            "geometry": self.config.geometry,
            "kind": self.config.kind,
            "k": self.config.k,
            "nlambda": self.config.nlambda,
            "beta": self.config.beta,
            "h": self.h,
            "N": self.n,
            "rel_error": self.rel_error,
            "rel_error_sqrt": self.rel_error_sqrt,
            "boundary_residual": self.boundary_residual,
            "cond": self.cond,
            "gmres_iters": self.iterations,
            "converged": self.converged,
        }
        out.update({f"seconds_{key}": val for key, val in self.timings.items()})
        return out

    def to_json(self) -> dict:
        data = {"summary": self.summary(), "config": asdict(self.config), "residuals": list(self.residuals)}
        if self.density is not None:
            data["density"] = complex_columns(self.density)
        if self.eigenvalues is not None:
            data["eigenvalues"] = complex_columns(self.eigenvalues)
        return data


def relative_error(numeric, exact, sqrt: bool = False) -> float:
    """``sum |numeric - exact|^2 / sum |exact|^2`` (the square root of it when ``sqrt``)."""
    numeric = np.asarray(numeric)
    exact = np.asarray(exact)
    if numeric.shape != exact.shape:
        raise ValueError("numeric and exact values must have the same shape")
    denom = float(np.sum(np.abs(exact) ** 2))
    if denom == 0.0:
        raise ZeroDivisionError("exact values are all zero")
    ratio = float(np.sum(np.abs(numeric - exact) ** 2)) / denom
    return math.sqrt(ratio) if sqrt else ratio


class _Timer:
    def __init__(self, store, key):
        self.store, self.key = store, key

    def __enter__(self):
        self.t0 = time.perf_counter()

    def __exit__(self, *exc):
        self.store[self.key] = self.store.get(self.key, 0.0) + time.perf_counter() - self.t0


def build_operator(config: ExperimentConfig, timings: dict | None = None):
    """Mesh and operator for ``config``."""
    timings = {} if timings is None else timings
    curve = parse_geometry(config.geometry)
    with _Timer(timings, "setup"):
        mesh = build_mesh(curve, config.k, config.nlambda, config.displacement,
                          node_rule=config.node_rule, n=config.n)
        op = VirtualSourceOperator(mesh, config.pade_terms, config.pade_angle, config.damping,
                                   matrix_free=config.matrix_free)
    logger.info("N = %d, h = %.4g (lambda/%.3g)", mesh.n, mesh.h, config.wavelength / mesh.h)
    return mesh, op


def _solve(op, rhs, config, report):
    with _Timer(report.timings, "solve"):
        result = gmres(op.apply_BA, op.apply_B(rhs), tol=config.tol, max_iter=config.max_iter,
                       restart=config.restart)
    report.density = result.solution
    report.residuals = [float(r) for r in result.residuals]
    report.iterations = result.iterations
    report.converged = result.converged
    if not result.converged:
        logger.warning("GMRES did not reach %.1e in %d iterations", config.tol, result.iterations)
    return result


def _score(report, numeric, exact):
    report.rel_error = relative_error(numeric, exact)
    report.rel_error_sqrt = math.sqrt(report.rel_error)


def run_manufactured(config: ExperimentConfig) -> SolveReport:
    """Boundary data from the four-source field; error on the parallel curve at ``probe_offset``."""
    timings: dict = {}
    mesh, op = build_operator(config, timings)
    ManufacturedField(config.k).check_inside(mesh.curve)
    report = SolveReport(config, mesh.n, mesh.h, timings=timings)
    _solve(op, manufactured_field(config.k, mesh.nodes), config, report)
    with _Timer(timings, "evaluate"):
        probes = mesh.parallel_points(config.probe_offset)
        _score(report, op.evaluate_field(report.density, probes), manufactured_field(config.k, probes))
    return report


def _midpoints_on_circle(radius, count):
    t = (np.arange(count) + 0.5) * (2 * math.pi / count)
    return radius * np.stack([np.cos(t), np.sin(t)], axis=-1)


def run_planewave(config: ExperimentConfig) -> SolveReport:
    """Sound-soft circle hit by ``exp(ikx)``; scattered field compared with the series solution.

    Also records the boundary residual ``sum |u_total|^2 / sum |u_inc|^2`` at
    the midpoints between nodes.
    """
    return _planewave(config)[0]


def _planewave(config):
    curve = parse_geometry(config.geometry)
    if curve.kind != "circle":
        raise ValueError("the plane-wave benchmark needs geometry 'circle:R'")
    timings: dict = {}
    mesh, op = build_operator(config, timings)
    report = SolveReport(config, mesh.n, mesh.h, timings=timings)
    _solve(op, -np.exp(1j * config.k * mesh.nodes[:, 0]), config, report)
    with _Timer(timings, "evaluate"):
        probes = mesh.parallel_points(config.probe_offset)
        exact, _ = mie_soft_circle(config.k, curve.radius, probes)
        _score(report, op.evaluate_field(report.density, probes), exact)
        mids = _midpoints_on_circle(curve.radius, mesh.n)
        incident = np.exp(1j * config.k * mids[:, 0])
        total = op.evaluate_field(report.density, mids, check_outside=False) + incident
        report.boundary_residual = float(np.sum(np.abs(total) ** 2) / np.sum(np.abs(incident) ** 2))
    return report, op


def run_solve(config: ExperimentConfig) -> SolveReport:
    if config.kind == "planewave" or (config.kind != "manufactured" and config.geometry.startswith("circle")):
        return run_planewave(config)
    return run_manufactured(config)


def run_spectrum(config: ExperimentConfig, which: str = "BA") -> SolveReport:
    """All eigenvalues of the dense ``B A`` (or ``A``) and the spectral condition number."""
    timings: dict = {}
    mesh, op = build_operator(config, timings)
    report = SolveReport(config, mesh.n, mesh.h, timings=timings)
    with _Timer(timings, "assemble"):
        dense = op.assemble_dense(which)
    with _Timer(timings, "eigen"):
        report.eigenvalues = eigenvalues_dense(dense)
    report.cond = condition_number(report.eigenvalues)
    return report


TABLE_FIELDS = ("nlambda", "beta", "h", "N", "cond", "rel_error", "rel_error_sqrt", "gmres_iters", "seconds")


def run_table(config: ExperimentConfig, nlambdas=(12, 24, 48, 96), betas=(0.0, 0.5, 1.0), out=None,
              spectra: bool = True):
    """Condition number and manufactured-solution error over a ``(nlambda, beta)`` grid.

    Rows are yielded in the order ``beta``-major; when ``out`` is a path each
    row is appended and flushed immediately so partial sweeps survive a crash.
    """
    rows = []
    handle = None
    writer = None
    if out is not None:
        handle = open(out, "w", newline="")
        writer = csv.writer(handle)
        writer.writerow(TABLE_FIELDS)
        handle.flush()
    try:
        for beta in betas:
            for nl in nlambdas:
                cfg = _replace(config, nlambda=float(nl), beta=float(beta), kind="manufactured", h=None)
                t0 = time.perf_counter()
                rep = run_manufactured(cfg)
                cond = run_spectrum(cfg).cond if spectra else float("nan")
                row = {
                    "nlambda": float(nl),
                    "beta": float(beta),
                    "h": rep.h,
                    "N": rep.n,
                    "cond": cond,
                    "rel_error": rep.rel_error,
                    "rel_error_sqrt": rep.rel_error_sqrt,
                    "gmres_iters": rep.iterations,
                    "seconds": time.perf_counter() - t0,
                }
                rows.append(row)
                logger.info("nlambda=%g beta=%g N=%d cond=%.3g err=%.3g", nl, beta, rep.n, cond, rep.rel_error)
                if writer is not None:
                    writer.writerow([_fmt(row[key]) for key in TABLE_FIELDS])
                    handle.flush()
    finally:
        if handle is not None:
            handle.close()
    return rows


def run_mie_compare(config: ExperimentConfig, extent: float = 2.0, points: int = 81):
    """Numeric and series scattered fields on a square grid outside the circle.

    Returns the solve report and grid rows ``(x, y, re_u, im_u, abs_u, re_exact, im_exact, abs_err)``.
    """
    curve = parse_geometry(config.geometry)
    if curve.kind != "circle":
        raise ValueError("mie-compare needs geometry 'circle:R'")
    report, op = _planewave(_replace(config, kind="planewave"))
    axis = np.linspace(-extent, extent, points) * curve.radius
    xx, yy = np.meshgrid(axis, axis)
    grid = np.stack([xx.ravel(), yy.ravel()], axis=-1)
    keep = np.hypot(grid[:, 0], grid[:, 1]) > curve.radius * (1 + 1e-9)
    grid = grid[keep]
    numeric = op.evaluate_field(report.density, grid, check_outside=False)
    exact, _ = mie_soft_circle(config.k, curve.radius, grid)
    rows = [
        (x, y, u.real, u.imag, abs(u), e.real, e.imag, abs(u - e))
        for (x, y), u, e in zip(grid, numeric, exact)
    ]
    return report, rows


def _replace(config: ExperimentConfig, **changes) -> ExperimentConfig:
    data = asdict(config)
    data.update(changes)
    return ExperimentConfig(**data)


# ----------------------------------------------------------------------------- output


def complex_columns(values) -> dict:
    values = np.asarray(values)
    return {"re": values.real.tolist(), "im": values.imag.tolist()}


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_rows(path, header, rows, fmt: str = "csv") -> None:
    """Write rows as CSV (header line first) or as a JSON list of objects.

    Floats are written with ``repr`` so that parsing recovers them exactly.
    """
    path = Path(path)
    if fmt == "json":
        records = [dict(zip(header, (_plain(v) for v in row))) for row in rows]
        path.write_text(json.dumps(records, indent=1))
        return
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _plain(value):
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    return value


def read_csv(path):
    """Parse a CSV written by :func:`write_rows` back into dicts of floats/strings."""
    out = []
    with open(path, newline="") as fh:
        for record in csv.DictReader(fh):
            parsed = {}
            for key, val in record.items():
                try:
                    parsed[key] = float(val)
                except ValueError:
                    parsed[key] = val
            out.append(parsed)
    return out


def write_report(report: SolveReport, path, fmt: str = "csv") -> None:
    """Summary row (CSV) or the full report including densities and histories (JSON)."""
    if fmt == "json":
        Path(path).write_text(json.dumps(_jsonable(report.to_json()), indent=1))
        return
    summary = report.summary()
    write_rows(path, list(summary), [list(summary.values())], fmt)


def write_eigenvalues(report: SolveReport, path, fmt: str = "csv") -> None:
    eigs = np.asarray(report.eigenvalues)
    mags = np.abs(eigs)
    header = ["index", "re", "im", "abs", "max_abs", "min_abs", "cond"]
    rows = [(i, e.real, e.imag, abs(e), mags.max(), mags.min(), report.cond) for i, e in enumerate(eigs)]
    if fmt == "json":
        data = {"summary": report.summary(), "max_abs": float(mags.max()), "min_abs": float(mags.min()),
                "eigenvalues": complex_columns(eigs)}
        Path(path).write_text(json.dumps(_jsonable(data), indent=1))
        return
    write_rows(path, header, rows, fmt)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return _plain(obj)
