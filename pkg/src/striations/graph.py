"""Compact simple graphs in CSR form, edge-list I/O and direction conversions."""
from __future__ import annotations

from dataclasses import dataclass, field
from importlib.resources import files
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from striations.rng import stream

__all__ = [
    "ContractError",
    "EdgeListError",
    "Graph",
    "parse_edge_list",
    "read_edge_list",
    "format_edge_list",
    "to_undirected_simple",
    "to_directed_coinflip",
    "karate",
]


class ContractError(ValueError):
    """An argument violates an operation's precondition."""


class EdgeListError(ValueError):
    """Malformed edge-list input."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple graph.

    Neighbour lists live in CSR arrays: the (out-)neighbours of ``v`` are
    ``indices[indptr[v]:indptr[v + 1]]``, strictly ascending. Undirected
    graphs store every edge in both lists. ``edge_count`` counts an
    undirected edge once.

    ``meta`` carries construction statistics (dropped self-loops and
    duplicates, unmatched stubs, ...) and takes no part in equality.
    """

    n: int
    directed: bool
    indptr: np.ndarray
    indices: np.ndarray
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_edges(cls, n: int, src, dst, directed: bool = False) -> Graph:
        """Build a simple graph from endpoint arrays, silently dropping
        self-loops and repeated edges (counts recorded in ``meta``)."""
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise ContractError("src and dst must have equal length")
        if src.size and (min(src.min(), dst.min()) < 0 or max(src.max(), dst.max()) >= n):
            raise ContractError(f"endpoint out of range [0, {n})")
        loops = src == dst
        n_loops = int(loops.sum())
        src, dst = src[~loops], dst[~loops]
        if not directed:
            src, dst = np.minimum(src, dst), np.maximum(src, dst)
        key = np.unique(src * n + dst) if n else np.empty(0, dtype=np.int64)
        n_dups = int(src.size - key.size)
        src, dst = key // max(n, 1), key % max(n, 1)
        if not directed:
            src, dst = np.concatenate([src, dst]), np.concatenate([dst, src])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        return cls(n, directed, indptr, dst, {"self_loops_dropped": n_loops, "duplicates_dropped": n_dups})

    @property
    def edge_count(self) -> int:
        nnz = int(self.indices.size)
        return nnz if self.directed else nnz // 2

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degree(self) -> np.ndarray:
        """Out-degree per node (the degree for undirected graphs)."""
        return np.diff(self.indptr)

    def in_degree(self) -> np.ndarray:
        return np.bincount(self.indices, minlength=self.n)

    def arcs(self) -> tuple[np.ndarray, np.ndarray]:
        """Every nonzero adjacency cell (row, column) in row-major order.
        Undirected edges appear twice."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self.degree())
        return rows, self.indices

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Edges in ascending (u, v) order; u < v for undirected graphs."""
        u, v = self.arcs()
        if self.directed:
            return u, v
        keep = u < v
        return u[keep], v[keep]

    def adjacency(self) -> sp.csr_matrix:
        """Sparse adjacency matrix with A[u, v] = 1 for every arc u -> v."""
        data = np.ones(self.indices.size, dtype=np.float64)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and self.directed == other.directed
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    __hash__ = None

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"Graph(n={self.n}, edges={self.edge_count}, {kind})"


def parse_edge_list(text: str, directed: bool = False, remap: bool = False) -> Graph:
    """Parse a whitespace-separated edge list.

    Lines starting with ``#`` and blank lines are skipped. Node ids are
    taken literally (``n = max id + 1``) unless ``remap`` is set, in which
    case ids are renumbered densely in order of first appearance.
    Self-loops and duplicate edges are dropped; ``meta`` records how many.
    """
    src: list[int] = []
    dst: list[int] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        tokens = s.split()
        if len(tokens) != 2:
            raise EdgeListError(lineno, f"expected 2 tokens, got {len(tokens)}")
        for tok in tokens:
            if tok.startswith("-") and tok[1:].isdigit():
                raise EdgeListError(lineno, f"negative node id {tok!r}")
            if not (tok.isascii() and tok.isdigit()):
                raise EdgeListError(lineno, f"not a non-negative integer: {tok!r}")
        src.append(int(tokens[0]))
        dst.append(int(tokens[1]))

    if remap:
        ids: dict[int, int] = {}
        for a, b in zip(src, dst):
            ids.setdefault(a, len(ids))
            ids.setdefault(b, len(ids))
        src = [ids[a] for a in src]
        dst = [ids[b] for b in dst]
        n = len(ids)
    else:
        n = max(max(src, default=-1), max(dst, default=-1)) + 1
    g = Graph.from_edges(n, src, dst, directed=directed)
    g.meta["lines"] = len(src)
    return g


def read_edge_list(path: str | Path, directed: bool = False, remap: bool = False) -> Graph:
    return parse_edge_list(Path(path).read_text(encoding="utf-8"), directed=directed, remap=remap)


def format_edge_list(g: Graph) -> str:
    """One ``u v`` line per edge (per arc when directed), ascending."""
    u, v = g.edges()
    return "".join(f"{a} {b}\n" for a, b in zip(u.tolist(), v.tolist()))


def to_undirected_simple(g: Graph) -> Graph:
    if not g.directed:
        return g
    u, v = g.arcs()
    return Graph.from_edges(g.n, u, v, directed=False)


def to_directed_coinflip(g: Graph, seed: int) -> Graph:
    """Orient each undirected edge by a fair coin.

    Edges are visited in ascending (u, v) order with u < v; a draw below
    one half keeps u -> v, otherwise v -> u.
    """
    if g.directed:
        raise ContractError("coin-flip orientation needs an undirected graph")
    u, v = g.edges()
    keep = stream(seed, "coinflip").random(u.size) < 0.5
    src = np.where(keep, u, v)
    dst = np.where(keep, v, u)
    return Graph.from_edges(g.n, src, dst, directed=True)


def karate() -> Graph:
    """Zachary's karate club (34 nodes, 78 edges), bundled with the package."""
    return parse_edge_list(files("striations").joinpath("data/karate.el").read_text(encoding="utf-8"))
