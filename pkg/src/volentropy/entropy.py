"""Volume entropy: the unique h > 0 where the weighted matrix has unit
spectral radius.

The Perron root of the h-weighted non-backtracking matrix is strictly
decreasing in h, starts above 1 (the graph is not a cycle), and tends to 0;
bisection with sign-bracketing therefore finds the root without relying on
anything beyond continuity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import config, spectral
from .errors import ConvergenceError, GraphError
from .graph import MetricGraph, validate_entropy_hypotheses
from .spectral import edge_adjacency, is_irreducible


@dataclass(frozen=True)
class EntropySolution:
    """Entropy value with the fixed-point vector and solver diagnostics.

    ``vector`` is the Perron vector at the solved h, max-normalized;
    ``bracket`` is the final root interval and ``residual`` the max-norm
    defect of the fixed-point system.
    """

    h: float
    vector: dict[str, float]
    bracket: tuple[float, float]
    residual: float
    iterations: int


@dataclass(frozen=True)
class UnitRadiusSolution:
    h: float
    vector: np.ndarray
    bracket: tuple[float, float]
    residual: float
    evaluations: int


def solve_unit_radius(
    rows: np.ndarray,
    cols: np.ndarray,
    vals: np.ndarray,
    n: int,
    lengths: np.ndarray,
    *,
    root_tol: float = config.ROOT_TOL,
    residual_tol: float = config.RESIDUAL_TOL,
) -> UnitRadiusSolution:
    """Solve radius(h) = 1 for a weighted nonnegative edge matrix.

    The matrix at weight h has entry vals * exp(-h * lengths[col]); the
    caller guarantees irreducibility.
    """

    def radius_at(h: float) -> float:
        matrix = spectral.assemble(rows, cols, vals, n, h, lengths)
        lam, _, _, _ = spectral.power_iteration(matrix)
        return lam

    evaluations = 1
    lam0 = radius_at(0.0)
    assert lam0 > 1.0, (
        "spectral radius at h=0 must exceed 1 once the entropy hypotheses hold"
    )
    hi = 1.0
    while radius_at(hi) >= 1.0:
        evaluations += 1
        hi *= 2.0
        if hi > 2.0**64:
            raise ConvergenceError("failed to bracket the entropy root")
    evaluations += 1
    lo = 0.0
    while hi - lo >= root_tol:
        mid = 0.5 * (lo + hi)
        evaluations += 1
        if radius_at(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    h = 0.5 * (lo + hi)
    matrix = spectral.assemble(rows, cols, vals, n, h, lengths)
    _, vec, _, _ = spectral.power_iteration(matrix)
    evaluations += 1
    residual = float(np.max(np.abs(vec - matrix @ vec)))
    if residual > residual_tol:
        raise ConvergenceError(
            f"fixed-point residual {residual:.3e} exceeds {residual_tol:.1e}"
        )
    return UnitRadiusSolution(h, vec, (lo, hi), residual, evaluations)


def volume_entropy(
    g: MetricGraph,
    *,
    root_tol: float = config.ROOT_TOL,
    residual_tol: float = config.RESIDUAL_TOL,
) -> EntropySolution:
    """Volume entropy of a metric graph, with its fixed-point vector."""
    report = validate_entropy_hypotheses(g)
    if not report.ok:
        raise GraphError(f"entropy hypotheses violated: {'; '.join(report.failures())}")
    if not is_irreducible(g):
        raise GraphError("edge adjacency matrix is reducible")
    adj = edge_adjacency(g)
    rows, cols, vals = spectral._triplets(adj)
    lengths = np.array([float(g.length(e)) for e in adj.edge_ids])
    solution = solve_unit_radius(
        rows, cols, vals, adj.order, lengths,
        root_tol=root_tol, residual_tol=residual_tol,
    )
    vector = {eid: float(v) for eid, v in zip(adj.edge_ids, solution.vector)}
    return EntropySolution(
        solution.h, vector, solution.bracket, solution.residual, solution.evaluations
    )


@dataclass(frozen=True)
class ResidualReport:
    max_residual: float
    mean_residual: float
    worst_edge: str


def verify_fixed_point(
    g: MetricGraph, h: float, x: Mapping[str, float]
) -> ResidualReport:
    """Residuals of the fixed-point system at (h, x); pure check."""
    if set(x) != {e.id for e in g.edges}:
        raise GraphError("vector must assign a value to every oriented edge")
    if any(not v > 0 for v in x.values()):
        raise GraphError("vector entries must be strictly positive")
    worst_edge = ""
    worst = -1.0
    total = 0.0
    for e in g.edges:
        rhs = sum(
            math.exp(-h * float(g.length(f))) * x[f]
            for f in g.out_edges(e.terminus)
            if f != e.reversal
        )
        defect = abs(x[e.id] - rhs)
        total += defect
        if defect > worst:
            worst = defect
            worst_edge = e.id
    return ResidualReport(worst, total / len(g.edges), worst_edge)


def entropy_volume_product(g: MetricGraph, **kwargs) -> float:
    """h_vol times volume; invariant under rescaling the metric."""
    from .graph import volume

    return volume_entropy(g, **kwargs).h * float(volume(g))
