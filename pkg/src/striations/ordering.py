"""Node permutations derived from score vectors."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from striations.centrality import RankVector
from striations.graph import ContractError
from striations.rng import stream

__all__ = ["Ordering", "order_by", "random_ordering", "format_order_csv", "parse_order_csv"]


@dataclass(frozen=True, eq=False)
class Ordering:
    """``permutation[i]`` is the node at rank ``i`` (0 = highest);
    ``position`` is its inverse."""

    permutation: np.ndarray
    source_measure: str

    @property
    def n(self) -> int:
        return int(self.permutation.size)

    @property
    def position(self) -> np.ndarray:
        pos = np.empty_like(self.permutation)
        pos[self.permutation] = np.arange(self.permutation.size)
        return pos

    @classmethod
    def from_permutation(cls, perm, source_measure: str = "custom") -> Ordering:
        perm = np.asarray(perm, dtype=np.int64)
        if not np.array_equal(np.sort(perm), np.arange(perm.size)):
            raise ContractError("not a permutation of 0..n-1")
        return cls(perm, source_measure)


def order_by(scores: RankVector | np.ndarray) -> Ordering:
    """Sort nodes by descending score, breaking ties by ascending node id."""
    measure = scores.measure if isinstance(scores, RankVector) else "custom"
    s = np.asarray(scores.scores if isinstance(scores, RankVector) else scores, dtype=np.float64)
    if np.isnan(s).any():
        raise ContractError("scores contain NaN")
    # lexsort: last key is primary
    perm = np.lexsort((np.arange(s.size), -s))
    return Ordering(perm.astype(np.int64), measure)


def random_ordering(n: int, seed: int) -> Ordering:
    """Uniform permutation: Fisher-Yates shuffle of 0..n-1."""
    if n < 0:
        raise ContractError("n must be non-negative")
    return Ordering(stream(seed, "random_ordering").permutation(n).astype(np.int64), "random")


def format_order_csv(o: Ordering) -> str:
    return "rank,node\n" + "".join(f"{r},{v}\n" for r, v in enumerate(o.permutation.tolist()))


def parse_order_csv(text: str) -> Ordering:
    rows = text.strip().splitlines()
    if not rows or rows[0].strip() != "rank,node":
        raise ValueError("order CSV must start with header 'rank,node'")
    perm = [int(r.split(",")[1]) for r in rows[1:] if r.strip()]
    return Ordering.from_permutation(perm)


def read_order_csv(path: str | Path) -> Ordering:
    return parse_order_csv(Path(path).read_text(encoding="utf-8"))
