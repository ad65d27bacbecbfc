"""Seeded synthetic graph families.

All generators return undirected simple graphs and are deterministic in
(parameters, seed).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from striations.graph import Graph
from striations.rng import UniformBuffer, stream

__all__ = [
    "ParameterError",
    "GenerationError",
    "ResourceLimitError",
    "KroneckerInitiator",
    "DegreeSequence",
    "preferential_attachment",
    "watts_strogatz",
    "erdos_renyi",
    "sample_degree_sequence",
    "configuration_model",
    "kronecker",
]

DEFAULT_MAX_NODES = 1 << 26


class ParameterError(ValueError):
    pass


class GenerationError(RuntimeError):
    pass


class ResourceLimitError(RuntimeError):
    pass


def preferential_attachment(n: int, m: int, seed: int) -> Graph:
    """Barabasi-Albert growth from a star on ``m + 1`` nodes.

    Every later node links to ``m`` distinct existing nodes picked with
    probability proportional to their current degree, which is done by
    sampling uniformly from the list of all edge endpoints so far.
    """
    if not (m >= 1 and n > m):
        raise ParameterError(f"need n > m >= 1, got n={n}, m={m}")
    n_edges = m + m * (n - m - 1)
    src = np.empty(n_edges, dtype=np.int64)
    dst = np.empty(n_edges, dtype=np.int64)
    src[:m] = 0
    dst[:m] = np.arange(1, m + 1)
    pool = np.empty(2 * n_edges, dtype=np.int64)
    pool[0 : 2 * m : 2] = 0
    pool[1 : 2 * m : 2] = np.arange(1, m + 1)
    size = 2 * m
    e = m
    u = UniformBuffer(stream(seed, "ba"))
    pool_list = pool  # local alias for the hot loop
    for v in range(m + 1, n):
        chosen: list[int] = []
        while len(chosen) < m:
            t = int(pool_list[u.below(size)])
            if t not in chosen:
                chosen.append(t)
        for t in chosen:
            src[e] = v
            dst[e] = t
            pool_list[size] = v
            pool_list[size + 1] = t
            size += 2
            e += 1
    return Graph.from_edges(n, src, dst)


def watts_strogatz(n: int, k: int, p: float, seed: int) -> Graph:
    """Ring lattice with k/2 neighbours per side, far endpoints rewired.

    Lattice edges (u, u + j) are visited for j = 1..k/2 and, within each j,
    for u = 0..n-1. With probability ``p`` the edge becomes (u, w) for a
    uniform w that is neither u nor an existing neighbour of u; nodes
    already adjacent to everyone are left alone.
    """
    if k % 2 or k < 2 or k >= n:
        raise ParameterError(f"need even k with 2 <= k < n, got n={n}, k={k}")
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"p must lie in [0, 1], got {p}")
    adj = [set() for _ in range(n)]
    for j in range(1, k // 2 + 1):
        for a in range(n):
            b = (a + j) % n
            adj[a].add(b)
            adj[b].add(a)
    u = UniformBuffer(stream(seed, "ws"))
    for j in range(1, k // 2 + 1):
        for a in range(n):
            if u.next() >= p:
                continue
            if len(adj[a]) >= n - 1:
                continue
            w = u.below(n)
            while w == a or w in adj[a]:
                w = u.below(n)
            b = (a + j) % n
            adj[a].discard(b)
            adj[b].discard(a)
            adj[a].add(w)
            adj[w].add(a)
    src = np.fromiter((a for a in range(n) for b in adj[a] if a < b), dtype=np.int64)
    dst = np.fromiter((b for a in range(n) for b in adj[a] if a < b), dtype=np.int64)
    return Graph.from_edges(n, src, dst)


def erdos_renyi(n: int, p: float, seed: int) -> Graph:
    """G(n, p): pairs (i, j), i < j, drawn row by row."""
    if n < 0 or not 0.0 <= p <= 1.0:
        raise ParameterError(f"need n >= 0 and p in [0, 1], got n={n}, p={p}")
    rng = stream(seed, "er")
    src, dst = [], []
    for i in range(n - 1):
        hit = np.flatnonzero(rng.random(n - i - 1) < p)
        if hit.size:
            src.append(np.full(hit.size, i, dtype=np.int64))
            dst.append(hit + i + 1)
    if not src:
        return Graph.from_edges(n, [], [])
    return Graph.from_edges(n, np.concatenate(src), np.concatenate(dst))


@dataclass(frozen=True, eq=False)
class DegreeSequence:
    degrees: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.degrees, dtype=np.int64)
        object.__setattr__(self, "degrees", d)
        if d.size and d.min() < 0:
            raise ParameterError("degrees must be non-negative")
        if int(d.sum()) % 2:
            raise ParameterError("degree sum must be even")
        if d.size and d.max() >= d.size:
            raise ParameterError("max degree must be below n")

    def __len__(self) -> int:
        return int(self.degrees.size)


def sample_degree_sequence(n: int, family: str, param: float, seed: int) -> DegreeSequence:
    """I.i.d. degrees from ``powerlaw`` (P(k) ~ k^-param, 1 <= k <= n-1)
    or ``poisson`` (mean ``param``).

    Poisson draws above n-1 are clipped to n-1 so the sequence stays
    graphical in size. An odd total is fixed by adding one to a uniformly
    chosen entry that is still below n-1.
    """
    if n < 2:
        raise ParameterError("n must be at least 2")
    rng = stream(seed, f"degseq:{family}")
    if family == "powerlaw":
        if not param > 2:
            raise ParameterError(f"power-law exponent must exceed 2, got {param}")
        k = np.arange(1, n, dtype=np.float64)
        cdf = np.cumsum(k ** -param)
        cdf /= cdf[-1]
        idx = np.searchsorted(cdf, rng.random(n), side="right")
        deg = np.minimum(idx, n - 2) + 1
    elif family == "poisson":
        if not param > 0:
            raise ParameterError(f"Poisson mean must be positive, got {param}")
        deg = np.minimum(rng.poisson(param, n), n - 1)
    else:
        raise ParameterError(f"unknown degree family {family!r}")
    deg = deg.astype(np.int64)
    if deg.sum() % 2:
        room = np.flatnonzero(deg < n - 1)
        deg[room[rng.integers(room.size)]] += 1
    return DegreeSequence(deg)


def _match_once(stubs: np.ndarray, n: int, rng: np.random.Generator, max_stalls: int):
    """One stub-matching attempt. Offending pairs (self-loops, repeats)
    go back into the pool, which is reshuffled and re-paired until empty or
    until ``max_stalls`` consecutive rounds add nothing."""
    accepted = np.empty(0, dtype=np.int64)
    pool = stubs.copy()
    stalls = 0
    while pool.size and stalls < max_stalls:
        pool = rng.permutation(pool)
        a, b = pool[0::2], pool[1::2]
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        key = lo * n + hi
        ok = (lo != hi) & ~np.isin(key, accepted)
        # only the first occurrence of a repeated pair within this round survives
        _, first = np.unique(key, return_index=True)
        is_first = np.zeros(key.size, dtype=bool)
        is_first[first] = True
        ok &= is_first
        stalls = 0 if ok.any() else stalls + 1
        accepted = np.concatenate([accepted, key[ok]])
        pool = np.concatenate([a[~ok], b[~ok]])
    return accepted, int(pool.size)


def configuration_model(
    seq: DegreeSequence,
    seed: int,
    retries: int = 100,
    max_residual_fraction: float = 0.01,
) -> Graph:
    """Random simple graph with (nearly) the given degree sequence.

    Up to ``retries`` matching attempts are made; the first one that pairs
    every stub wins. Otherwise the attempt with the fewest unmatched stubs
    is returned if they are at most ``max_residual_fraction`` of all stubs,
    and ``GenerationError`` is raised if not. ``meta['residual_stubs']``
    reports the unmatched count.
    """
    deg = seq.degrees
    n = deg.size
    stubs = np.repeat(np.arange(n, dtype=np.int64), deg)
    rng = stream(seed, "configuration")
    best, best_res = None, None
    for attempt in range(1, retries + 1):
        keys, residual = _match_once(stubs, max(n, 1), rng, max_stalls=10)
        if best_res is None or residual < best_res:
            best, best_res = keys, residual
        if residual == 0:
            break
    if best_res > max_residual_fraction * stubs.size:
        raise GenerationError(
            f"{best_res} of {stubs.size} stubs left unmatched after {retries} attempts"
        )
    g = Graph.from_edges(n, best // max(n, 1), best % max(n, 1))
    g.meta.update(residual_stubs=best_res, attempts=attempt)
    return g


@dataclass(frozen=True, eq=False)
class KroneckerInitiator:
    entries: np.ndarray
    power: int

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=np.float64)
        object.__setattr__(self, "entries", e)
        if e.shape != (2, 2):
            raise ParameterError("initiator must be 2x2")
        if ((e < 0) | (e > 1)).any():
            raise ParameterError("initiator entries must lie in [0, 1]")
        if self.power < 1:
            raise ParameterError("Kronecker power must be at least 1")

    @property
    def n(self) -> int:
        return 1 << self.power

    def expected_edges(self) -> float:
        return float(self.entries.sum()) ** self.power


def kronecker(init: KroneckerInitiator, seed: int, max_nodes: int = DEFAULT_MAX_NODES, chunk: int = 1 << 20) -> Graph:
    """Stochastic Kronecker graph by ball dropping.

    ``round(sum(entries) ** t)`` candidate edges are placed; each one
    descends t levels, picking a quadrant of the initiator with probability
    proportional to its entry. Collisions and self-loops vanish when the
    result is simplified to an undirected graph.
    """
    if init.n > max_nodes:
        raise ResourceLimitError(f"2^{init.power} nodes exceeds the limit of {max_nodes}")
    t = init.power
    total = float(init.entries.sum())
    n_balls = int(round(init.expected_edges())) if total > 0 else 0
    probs = init.entries.ravel() / total if total > 0 else None
    rng = stream(seed, "kronecker")
    src_parts, dst_parts = [], []
    for start in range(0, n_balls, chunk):
        size = min(chunk, n_balls - start)
        quad = rng.choice(4, size=(size, t), p=probs)
        weights = np.int64(1) << np.arange(t - 1, -1, -1, dtype=np.int64)
        src_parts.append((quad // 2) @ weights)
        dst_parts.append((quad % 2) @ weights)
    src = np.concatenate(src_parts) if src_parts else np.empty(0, dtype=np.int64)
    dst = np.concatenate(dst_parts) if dst_parts else np.empty(0, dtype=np.int64)
    g = Graph.from_edges(init.n, src, dst)
    g.meta["candidates"] = n_balls
    return g
