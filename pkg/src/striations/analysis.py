"""Diagnostic datasets for ordered adjacency matrices.

Scatter exports have one row per nonzero matrix cell (each undirected edge
gives two rows), sorted by source rank and then target rank.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from striations.centrality import RankVector
from striations.graph import ContractError, Graph
from striations.ordering import Ordering

__all__ = [
    "ScatterDataset",
    "BoundaryReport",
    "neighborhood_distribution",
    "scatter",
    "boundary_check",
    "column_density_profile",
    "monotone_steps",
    "neighbor_rank_ks",
    "count_gap_clusters",
    "format_scatter_csv",
    "format_boundary_csv",
]


@dataclass(frozen=True, eq=False)
class ScatterDataset:
    """Column arrays for a per-cell scatter plot.

    For :func:`neighborhood_distribution` ``color`` is the degree class of
    the source; for :func:`scatter` it holds the source's normalised score,
    i.e. the plot's y coordinate.
    """

    source: np.ndarray
    source_rank: np.ndarray
    target: np.ndarray
    x: np.ndarray
    color: np.ndarray
    x_axis: str = "value"
    x_scale: str = "linear"
    y_axis: str = "order"

    def __len__(self) -> int:
        return int(self.source.size)


@dataclass(frozen=True, eq=False)
class BoundaryReport:
    degree_class: int
    nodes: np.ndarray
    residuals: np.ndarray
    # degree 2 only: max over the two neighbours j of |lambda*I_i - 2*I_j|
    similarity_residuals: np.ndarray | None = None

    @property
    def node_count(self) -> int:
        return int(self.nodes.size)

    @property
    def max_residual(self) -> float:
        return float(self.residuals.max()) if self.residuals.size else 0.0

    @property
    def mean_residual(self) -> float:
        return float(self.residuals.mean()) if self.residuals.size else 0.0


def _cells_by_rank(g: Graph, ordering: Ordering):
    pos = ordering.position
    u, v = g.arcs()
    order = np.lexsort((pos[v], pos[u]))
    return u[order], v[order], pos


def _minmax(s: np.ndarray) -> np.ndarray:
    lo, hi = s.min(), s.max()
    if hi == lo:
        return np.full(s.size, 0.5)
    return (s - lo) / (hi - lo)


def neighborhood_distribution(
    g: Graph,
    pr: RankVector,
    ordering: Ordering,
    degree_threshold: int = 10,
    x_scale: str = "log",
) -> ScatterDataset:
    """PageRank of every neighbour, one row per (node, neighbour).

    The y position is the node's rank; ``color`` is 1 for nodes of degree
    at least ``degree_threshold``.
    """
    if x_scale not in ("linear", "log"):
        raise ContractError(f"unknown x_scale {x_scale!r}")
    u, v, pos = _cells_by_rank(g, ordering)
    x = np.asarray(pr.scores, dtype=np.float64)[v]
    if x_scale == "log" and x.size and x.min() <= 0:
        raise ContractError("log scale needs strictly positive scores")
    color = (g.degree()[u] >= degree_threshold).astype(np.float64)
    return ScatterDataset(u, pos[u], v, x, color, x_axis="value", x_scale=x_scale, y_axis="order")


def scatter(g: Graph, scores: RankVector, ordering: Ordering, x_axis: str = "value") -> ScatterDataset:
    """Value/value or value/order association of edge endpoints.

    Scores are min-max normalised to [0, 1] (all-equal scores map to 0.5).
    ``x`` is the target's normalised score (``value``) or its rank
    (``order``); ``color`` carries the source's normalised score.
    """
    if x_axis not in ("value", "order"):
        raise ContractError(f"unknown x_axis {x_axis!r}")
    u, v, pos = _cells_by_rank(g, ordering)
    s = np.asarray(scores.scores, dtype=np.float64)
    norm = _minmax(s) if s.size else s
    x = norm[v] if x_axis == "value" else pos[v].astype(np.float64)
    return ScatterDataset(u, pos[u], v, x, norm[u], x_axis=x_axis, x_scale="linear", y_axis="value")


def boundary_check(g: Graph, ev: RankVector, degree_class: int) -> BoundaryReport:
    """Residuals of the spectral identity lambda * I_i = sum of I_j over
    neighbours j, for every node of degree 1 or 2."""
    if ev.principal_eigenvalue is None:
        raise ContractError("eigenvector RankVector without principal eigenvalue")
    if g.directed:
        raise ContractError("boundary check needs an undirected graph")
    if degree_class not in (1, 2):
        raise ContractError("degree_class must be 1 or 2")
    lam = ev.principal_eigenvalue
    x = np.asarray(ev.scores, dtype=np.float64)
    deg = g.degree()
    nodes = np.flatnonzero(deg == degree_class)
    nbrs = g.indices[g.indptr[nodes][:, None] + np.arange(degree_class)]
    residuals = np.abs(lam * x[nodes] - x[nbrs].sum(axis=1))
    similarity = None
    if degree_class == 2:
        similarity = np.abs(lam * x[nodes][:, None] - 2.0 * x[nbrs]).max(axis=1)
    return BoundaryReport(degree_class, nodes, residuals, similarity)


def column_density_profile(g: Graph, ordering: Ordering, bins: int) -> np.ndarray:
    """Share of edge endpoints per equal-width bin of the rank axis.

    Bin 0 holds the top-ranked nodes. Each edge (or arc) contributes both
    of its endpoints. An edgeless graph yields all zeros.
    """
    if bins < 1:
        raise ContractError("bins must be at least 1")
    pos = ordering.position
    u, v = g.edges()
    ranks = np.concatenate([pos[u], pos[v]])
    counts = np.bincount(ranks * bins // max(g.n, 1), minlength=bins).astype(np.float64)
    total = counts.sum()
    return counts / total if total else counts


def monotone_steps(profile: np.ndarray) -> int:
    """Adjacent bin pairs where density does not increase away from the top."""
    p = np.asarray(profile)
    return int((p[:-1] >= p[1:]).sum())


def neighbor_rank_ks(g: Graph, ordering: Ordering) -> tuple[np.ndarray, np.ndarray]:
    """Kolmogorov-Smirnov distance between each node's neighbour-rank sample
    and the pooled neighbour ranks of all cells.

    Returns ``(nodes, distances)`` for every node with at least one
    neighbour, in rank order.
    """
    u, v, pos = _cells_by_rank(g, ordering)
    if u.size == 0:
        return np.empty(0, dtype=np.int64), np.empty(0)
    src, tgt = pos[u], pos[v]
    pooled = np.sort(tgt)
    starts = np.flatnonzero(np.r_[True, src[1:] != src[:-1]])
    counts = np.diff(np.r_[starts, src.size])
    i = np.arange(src.size) - np.repeat(starts, counts) + 1
    m = np.repeat(counts, counts)
    right = np.searchsorted(pooled, tgt, side="right") / pooled.size
    left = np.searchsorted(pooled, tgt, side="left") / pooled.size
    # within a node's sorted sample the ECDF steps at each point; the sup is
    # attained at a step, approached from either side
    d = np.maximum(np.abs(i / m - right), np.abs((i - 1) / m - left))
    return u[starts], np.maximum.reduceat(d, starts)


def count_gap_clusters(values: np.ndarray, factor: float = 15.0) -> int:
    """Number of 1-D clusters separated by wide gaps.

    Distinct values are sorted; a gap wider than ``factor`` times the even
    spacing ``(max - min) / (k - 1)`` of the k distinct values starts a new
    cluster.
    """
    x = np.unique(np.asarray(values, dtype=np.float64))
    if x.size < 2:
        return int(x.size)
    gaps = np.diff(x)
    even = (x[-1] - x[0]) / (x.size - 1)
    return 1 + int((gaps > factor * even).sum())


def format_scatter_csv(ds: ScatterDataset) -> str:
    lines = ["source,source_rank,target,x,color"]
    for s, r, t, x, c in zip(ds.source.tolist(), ds.source_rank.tolist(), ds.target.tolist(), ds.x.tolist(), ds.color.tolist()):
        lines.append(f"{s},{r},{t},{x:.17g},{c:.17g}")
    return "\n".join(lines) + "\n"


def format_boundary_csv(rep: BoundaryReport) -> str:
    lines = ["node,residual"]
    lines.extend(f"{v},{r:.17g}" for v, r in zip(rep.nodes.tolist(), rep.residuals.tolist()))
    lines.append(
        f"# degree_class={rep.degree_class} node_count={rep.node_count} "
        f"max_residual={rep.max_residual:.17g} mean_residual={rep.mean_residual:.17g}"
    )
    return "\n".join(lines) + "\n"
