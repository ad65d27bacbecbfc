"""PageRank, eigenvector centrality and classical centralities."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from striations.graph import ContractError, Graph

__all__ = [
    "MEASURES",
    "EmptyGraphError",
    "DegenerateSpectrumError",
    "RankVector",
    "PowerIterationConfig",
    "pagerank",
    "eigenvector_centrality",
    "classical_centrality",
    "compute",
    "format_rank_csv",
    "parse_rank_csv",
    "read_rank_csv",
]

MEASURES = ("pagerank", "eigenvector", "degree", "closeness", "betweenness")


class EmptyGraphError(ValueError):
    pass


class DegenerateSpectrumError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class RankVector:
    scores: np.ndarray
    measure: str
    iterations: int = 0
    converged: bool = True
    principal_eigenvalue: float | None = None

    def __len__(self) -> int:
        return int(self.scores.size)


@dataclass(frozen=True)
class PowerIterationConfig:
    """``tolerance`` bounds the L1 change between successive iterates."""

    damping: float = 0.85
    tolerance: float = 1e-10
    max_iterations: int = 50

    def __post_init__(self):
        if not 0.0 < self.damping < 1.0:
            raise ContractError(f"damping must lie in (0, 1), got {self.damping}")
        if not self.tolerance > 0:
            raise ContractError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ContractError("max_iterations must be at least 1")


def pagerank(g: Graph, cfg: PowerIterationConfig | None = None) -> RankVector:
    """PageRank by power iteration from the uniform vector.

    Undirected edges act as two opposing arcs. The walk mass sitting on
    dangling nodes is spread uniformly over all nodes each step.
    """
    cfg = cfg or PowerIterationConfig()
    n = g.n
    if n == 0:
        raise EmptyGraphError("PageRank of an empty graph is undefined")
    d = cfg.damping
    # rows of A^T list in-neighbours in ascending order
    at = g.adjacency().T.tocsr()
    at.sort_indices()
    out = g.degree().astype(np.float64)
    dangling = out == 0
    inv_out = np.divide(1.0, out, out=np.zeros(n), where=~dangling)

    p = np.full(n, 1.0 / n)
    converged = False
    it = 0
    while it < cfg.max_iterations:
        it += 1
        leak = d * p[dangling].sum()
        nxt = d * (at @ (p * inv_out)) + (leak + 1.0 - d) / n
        nxt /= nxt.sum()
        delta = np.abs(nxt - p).sum()
        p = nxt
        if delta < cfg.tolerance:
            converged = True
            break
    return RankVector(p, "pagerank", iterations=it, converged=converged)


def eigenvector_centrality(g: Graph, tolerance: float = 1e-10, max_iterations: int = 1000) -> RankVector:
    """Principal eigenvector of A^T with L2 normalisation.

    Iterates with the shifted operator ``A^T + I``: it has the same
    eigenvectors, but the shift makes the Perron root strictly dominant on
    bipartite graphs (paths, stars, trees) where plain power iteration
    oscillates between two vectors. The eigenvalue reported is the
    Rayleigh quotient of the final iterate.
    """
    if g.edge_count == 0:
        raise DegenerateSpectrumError("graph has no edges")
    at = g.adjacency().T.tocsr()
    at.sort_indices()
    x = np.full(g.n, 1.0 / np.sqrt(g.n))
    converged = False
    it = 0
    while it < max_iterations:
        it += 1
        y = at @ x + x
        y /= np.linalg.norm(y)
        delta = np.linalg.norm(y - x)
        x = y
        if delta < tolerance:
            converged = True
            break
    lam = float(x @ (at @ x))
    return RankVector(x, "eigenvector", iterations=it, converged=converged, principal_eigenvalue=lam)


def _bfs_levels(g: Graph, sources: np.ndarray):
    """Level-synchronous BFS from a batch of sources.

    Returns ``dist`` (n x b, -1 where unreachable), ``sigma`` (shortest path
    counts) and the adjacency matrix used.
    """
    a = g.adjacency()
    n, b = g.n, sources.size
    cols = np.arange(b)
    dist = np.full((n, b), -1, dtype=np.int64)
    sigma = np.zeros((n, b))
    dist[sources, cols] = 0
    sigma[sources, cols] = 1.0
    frontier = sigma.copy()
    level = 0
    while True:
        nxt = np.asarray(a.T @ frontier)
        nxt[dist >= 0] = 0.0
        found = nxt > 0
        if not found.any():
            break
        level += 1
        dist[found] = level
        sigma += nxt
        frontier = nxt
    return dist, sigma, a, level


def _batches(n: int, budget: int = 1 << 22):
    size = max(1, min(n, budget // max(n, 1)))
    for start in range(0, n, size):
        yield np.arange(start, min(n, start + size))


def _closeness(g: Graph) -> np.ndarray:
    out = np.zeros(g.n)
    for src in _batches(g.n):
        dist, _, _, _ = _bfs_levels(g, src)
        reach = (dist >= 0).sum(axis=0)
        total = np.where(dist > 0, dist, 0).sum(axis=0)
        out[src] = np.divide(reach - 1, total, out=np.zeros(src.size), where=total > 0)
    return out


def _betweenness(g: Graph) -> np.ndarray:
    # Brandes dependency accumulation, vectorised over a batch of sources.
    bc = np.zeros(g.n)
    for src in _batches(g.n):
        dist, sigma, a, depth = _bfs_levels(g, src)
        delta = np.zeros_like(sigma)
        safe_sigma = np.where(sigma > 0, sigma, 1.0)
        for level in range(depth, 0, -1):
            coeff = np.where(dist == level, (1.0 + delta) / safe_sigma, 0.0)
            pull = np.asarray(a @ coeff)
            delta += np.where(dist == level - 1, sigma * pull, 0.0)
        delta[src, np.arange(src.size)] = 0.0
        bc += delta.sum(axis=1)
    return bc / 2.0


def classical_centrality(g: Graph, measure: str) -> RankVector:
    """Degree, closeness or exact (unnormalised) betweenness.

    Closeness of v is (reachable - 1) / (sum of distances) within v's
    component, zero for isolated nodes. Betweenness counts each unordered
    pair once, splitting evenly across equal-length shortest paths.
    """
    if measure == "degree":
        return RankVector(g.degree().astype(np.float64), "degree")
    if measure not in ("closeness", "betweenness"):
        raise ContractError(f"unsupported measure {measure!r}")
    if g.directed:
        raise ContractError(f"{measure} is only implemented for undirected graphs")
    scores = _closeness(g) if measure == "closeness" else _betweenness(g)
    return RankVector(scores, measure)


def compute(g: Graph, measure: str, cfg: PowerIterationConfig | None = None) -> RankVector:
    if measure == "pagerank":
        return pagerank(g, cfg)
    if measure == "eigenvector":
        if cfg is None:
            return eigenvector_centrality(g)
        return eigenvector_centrality(g, tolerance=cfg.tolerance)
    return classical_centrality(g, measure)


def format_rank_csv(rv: RankVector) -> str:
    lines = ["node,score"]
    lines.extend(f"{i},{s:.17g}" for i, s in enumerate(rv.scores.tolist()))
    return "\n".join(lines) + "\n"


def parse_rank_csv(text: str, measure: str = "pagerank") -> RankVector:
    rows = text.strip().splitlines()
    if not rows or rows[0].strip() != "node,score":
        raise ValueError("rank CSV must start with header 'node,score'")
    body = [r.split(",") for r in rows[1:] if r.strip()]
    nodes = np.array([int(r[0]) for r in body], dtype=np.int64)
    if not np.array_equal(nodes, np.arange(nodes.size)):
        raise ValueError("rank CSV rows must list nodes 0..n-1 in order")
    return RankVector(np.array([float(r[1]) for r in body]), measure)


def read_rank_csv(path: str | Path, measure: str = "pagerank") -> RankVector:
    return parse_rank_csv(Path(path).read_text(encoding="utf-8"), measure)
