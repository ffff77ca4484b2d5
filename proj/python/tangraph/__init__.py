"""Local graph representations of immersions.

Thin wrapper over the compiled core. Reports come back as dictionaries with
the same layout as the command line tool's JSON output.
"""

import json

from . import _core
from ._core import (
    BoundaryEscape,
    Error,
    InvalidParams,
    MonotonicityViolated,
    NotAGraph,
    PreconditionViolated,
    ProbeHypothesisFailed,
    RankDeficient,
    UnknownEntry,
    lambda_cap,
)

__all__ = [
    "BoundaryEscape",
    "Error",
    "InvalidParams",
    "MonotonicityViolated",
    "NotAGraph",
    "PreconditionViolated",
    "ProbeHypothesisFailed",
    "RankDeficient",
    "UnknownEntry",
    "analyze_counterexample",
    "certify_du_bound",
    "check_property",
    "extract",
    "iteration_constants",
    "lambda_cap",
    "max_radius",
    "run_cli",
    "verify_main_theorem",
    "version",
    "zoo_entries",
]

__version__ = _core.version()


def version():
    return _core.version()


def zoo_entries():
    """Name -> default parameters of every built-in immersion."""
    return dict(_core.zoo_entries())


def extract(name, q, r, params=None, chart=0, grid=128, threads=1):
    """Graph sample summary and its CSV text at base point q (chart coordinates)."""
    summary, csv = _core.extract(name, params or {}, chart, list(q), r, grid, threads)
    return json.loads(summary), csv


def check_property(name, kind, r, lam, params=None, samples=16, seed=0, grid=128, threads=1):
    return json.loads(
        _core.check_property(name, params or {}, kind, r, lam, samples, seed, grid, threads)
    )


def max_radius(name, lam, kind, params=None, samples=16, seed=0, tol=1e-3, grid=128, threads=1):
    return json.loads(
        _core.max_radius(name, params or {}, lam, kind, samples, seed, tol, grid, threads)
    )


def verify_main_theorem(name, lam, params=None, samples=16, seed=0, tol=1e-3, grid=128, threads=1):
    return json.loads(
        _core.verify_main_theorem(name, params or {}, lam, samples, seed, tol, grid, threads)
    )


def certify_du_bound(name, q, r, lam, params=None, chart=0, grid=64):
    return json.loads(_core.certify_du_bound(name, params or {}, chart, list(q), r, lam, grid))


def analyze_counterexample(eps, delta, r, angles=4096):
    return json.loads(_core.analyze_counterexample(eps, delta, r, angles))


def iteration_constants():
    return json.loads(_core.iteration_constants())


def run_cli(*args):
    """Runs the command line tool in-process; returns (exit_code, stdout, stderr)."""
    return _core.run_cli([str(a) for a in args])
