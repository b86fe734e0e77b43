"""Virtual-source boundary integral solver for exterior 2D Helmholtz problems.

Sound-soft scattering is solved with a continuous layer of point sources
displaced a distance ``h`` inside the obstacle, combined with an on-surface
radiation condition (rotated Padé OSRC) that also serves as preconditioner.
"""
from ._backend import HAVE_COMPILED
from .experiments import ExperimentConfig, SolveReport, run_manufactured, run_planewave, run_spectrum, run_table
from .geometry import BoundaryCurve, Mesh, build_mesh, circle, flower, parse_geometry
from .linalg import gmres
from .operator import VirtualSourceOperator
from .osrc import OsrcOperator, pade
from .reference import manufactured_field, mie_soft_circle

__version__ = "0.1.0"

__all__ = [
    "HAVE_COMPILED",
    "BoundaryCurve",
    "ExperimentConfig",
    "Mesh",
    "OsrcOperator",
    "SolveReport",
    "VirtualSourceOperator",
    "build_mesh",
    "circle",
    "flower",
    "gmres",
    "manufactured_field",
    "mie_soft_circle",
    "pade",
    "parse_geometry",
    "run_manufactured",
    "run_planewave",
    "run_spectrum",
    "run_table",
]
