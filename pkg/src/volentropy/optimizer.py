"""Closed-form minimal volume entropy and the metric attaining it.

For a graph whose valencies are all at least three, the minimum of the
volume entropy over volume-1 metrics is half the sum over vertices of
(k+1) log k, where k+1 is the valency, and the minimizing length of an edge
is log(k_origin * k_terminus) divided by that sum.  Valency-2 vertices are
handled by series reduction; only chain totals are then canonical, and the
pulled-back metric splits each chain total evenly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from . import config, spectral
from .entropy import verify_fixed_point
from .errors import GraphError
from .graph import MetricGraph, base_id, series_reduce, validate_entropy_hypotheses


@dataclass(frozen=True)
class MinimalMetricResult:
    """Minimal entropy with the minimizing lengths and Perron data.

    ``lengths`` is keyed by unoriented edge id, ``perron`` by oriented edge
    id (max-normalized), ``z`` by vertex of valency at least three.  When the
    result was pulled back through a series reduction, ``canonical`` is
    ``"chain-totals-only"`` and the chain data records which original edges
    form each reduced edge; an even split across a chain is one choice among
    equally optimal ones.
    """

    h_min: float
    lengths: dict[str, float]
    perron: dict[str, float]
    z: dict[str, float]
    canonical: str = "exact"
    chains: dict[str, tuple[str, ...]] | None = None
    chain_totals: dict[str, float] | None = None


def _require_min_valency(g: MetricGraph, bound: int = 3) -> None:
    bad = [x for x in g.vertices if g.valency(x) < bound]
    if bad:
        raise GraphError(f"vertices of valency < {bound}: {bad}")


def minimal_entropy(g: MetricGraph) -> float:
    """Minimum entropy over volume-1 metrics; ignores the current lengths."""
    _require_min_valency(g)
    return 0.5 * sum((g.k(x) + 1) * math.log(g.k(x)) for x in g.vertices)


def minimal_metric(g: MetricGraph) -> MinimalMetricResult:
    """The unique entropy-minimizing normalized metric and its Perron data."""
    _require_min_valency(g)
    total = sum((g.k(x) + 1) * math.log(g.k(x)) for x in g.vertices)
    h = 0.5 * total
    lengths = {}
    for eid, u, v, _ in g.unoriented:
        lengths[eid] = math.log(g.k(u) * g.k(v)) / total
    k_max = max(g.k(x) for x in g.vertices)
    perron = {
        e.id: math.sqrt(g.k(e.terminus) / k_max) for e in g.edges
    }
    z = {x: 1.0 / math.sqrt(k_max * g.k(x)) for x in g.vertices}
    result = MinimalMetricResult(h, lengths, perron, z)
    check = verify_fixed_point(g.with_lengths(lengths), h, perron)
    if check.max_residual > config.RESIDUAL_TOL:
        raise AssertionError(
            f"closed-form minimizer violates the fixed-point system "
            f"(residual {check.max_residual:.3e})"
        )
    return result


def minimize_with_reduction(g: MetricGraph) -> MinimalMetricResult:
    """Minimal metric for graphs that may contain valency-2 chains.

    Series-reduces, minimizes on the reduction, and pulls lengths back by
    splitting each chain total evenly across its pieces.
    """
    report = validate_entropy_hypotheses(g)
    if not report.ok:
        raise GraphError(f"entropy hypotheses violated: {'; '.join(report.failures())}")
    reduced, chains = series_reduce(g)
    if all(len(chain) == 1 for chain in chains.values()):
        return minimal_metric(g)
    reduced_result = minimal_metric(reduced)
    lengths: dict[str, float] = {}
    for new_id, chain in chains.items():
        piece = reduced_result.lengths[new_id] / len(chain)
        for oriented in chain:
            lengths[base_id(oriented)] = piece
    metered = g.with_lengths(lengths)
    adj = spectral.edge_adjacency(metered)
    rows, cols, vals = spectral._triplets(adj)
    lvec = np.array([float(metered.length(e)) for e in adj.edge_ids])
    h = reduced_result.h_min
    matrix = spectral.assemble(rows, cols, vals, adj.order, h, lvec)
    radius, vec, _, _ = spectral.power_iteration(matrix)
    if abs(radius - 1.0) > config.RESIDUAL_TOL:
        raise AssertionError(
            f"pulled-back minimizer is off the unit spectral radius by {radius - 1.0:.3e}"
        )
    perron = {eid: float(v) for eid, v in zip(adj.edge_ids, vec)}
    z = {}
    for x in g.vertices:
        if g.valency(x) >= 3:
            f = g.out_edges(x)[0]
            z[x] = math.exp(-h * float(metered.length(f))) * perron[f]
    return MinimalMetricResult(
        h_min=h,
        lengths=lengths,
        perron=perron,
        z=z,
        canonical="chain-totals-only",
        chains=dict(chains),
        chain_totals={cid: reduced_result.lengths[cid] for cid in chains},
    )


def biregular_minimum(k1: int, k2: int, edge_count: int) -> tuple[float, Fraction]:
    """Minimal entropy and the uniform edge length of a biregular graph.

    ``edge_count`` counts oriented edges; every edge joins a (k1+1)-valent
    to a (k2+1)-valent vertex.
    """
    if not (isinstance(k1, int) and isinstance(k2, int)) or k1 < 2 or k2 < 2:
        raise GraphError(f"branching numbers must be integers >= 2, got {k1}, {k2}")
    if not isinstance(edge_count, int) or edge_count <= 0 or edge_count % 2:
        raise GraphError(f"oriented edge count must be a positive even integer, got {edge_count}")
    if k1 == k2:
        if edge_count % (k1 + 1):
            raise GraphError(
                f"no {k1 + 1}-regular graph has {edge_count} oriented edges"
            )
    elif (edge_count // 2) % (k1 + 1) or (edge_count // 2) % (k2 + 1):
        raise GraphError(
            f"no ({k1 + 1},{k2 + 1})-biregular graph has {edge_count} oriented edges"
        )
    h = (edge_count / 4.0) * math.log(k1 * k2)
    return h, Fraction(2, edge_count)


def min_entropy_free_rank(rank: int) -> float:
    """Minimal entropy over all graphs with free fundamental group of the
    given rank and no valency below three; attained by trivalent graphs."""
    if not isinstance(rank, int) or rank < 2:
        raise GraphError(f"rank must be an integer >= 2, got {rank}")
    return 3.0 * (rank - 1) * math.log(2.0)


def split_vertex(
    g: MetricGraph,
    x: str,
    partition: tuple[Sequence[str], Sequence[str]],
) -> MetricGraph:
    """Split vertex x into two vertices joined by a fresh unit-length edge.

    ``partition`` divides the oriented edges leaving x into the group that
    stays at x and the group moved to the new vertex; both groups need at
    least two edges.  The homotopy type is preserved.
    """
    outgoing = set(g.out_edges(x))
    if len(outgoing) < 4:
        raise GraphError(f"valency < 4 at {x!r}: nothing to split")
    stay, moved = (tuple(partition[0]), tuple(partition[1]))
    if sorted(stay + moved) != sorted(outgoing) or set(stay) & set(moved):
        raise GraphError("partition must split the outgoing edges at the vertex")
    if len(stay) < 2 or len(moved) < 2:
        raise GraphError("each partition class needs at least two edges")
    moved_set = set(moved)

    suffix = 1
    while f"{x}.{suffix}" in g.vertices:
        suffix += 1
    new_vertex = f"{x}.{suffix}"
    existing = set(g.unoriented_ids)
    counter = 1
    while f"f{counter}" in existing:
        counter += 1
    new_edge = f"f{counter}"

    records = []
    for eid, u, v, length in g.unoriented:
        if eid + "+" in moved_set:
            u = new_vertex
        if eid + "-" in moved_set:
            v = new_vertex
        records.append((eid, u, v, length))
    records.append((new_edge, x, new_vertex, Fraction(1)))
    return MetricGraph.from_unoriented(g.vertices + (new_vertex,), records)


def sample_normalized_metrics(
    g: MetricGraph, count: int, seed: int = config.SAMPLE_SEED
) -> Iterator[dict[str, float]]:
    """Symmetric-Dirichlet random volume-1 metrics on the unoriented edges."""
    rng = np.random.default_rng(seed)
    ids = g.unoriented_ids
    for _ in range(count):
        weights = rng.dirichlet(np.ones(len(ids)))
        yield dict(zip(ids, (float(w) for w in weights)))
