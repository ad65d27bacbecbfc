"""Rasterise ordered adjacency matrices into RGB images.

Orientation: the node at rank ``r`` occupies pixel row ``r*W // n`` and
pixel column ``W - 1 - r*W // n``, so the top-ranked nodes meet in the
top-right corner. Every nonzero cell (u, v) of the adjacency matrix lands
on pixel (row(u), col(v)).
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from striations.centrality import RankVector
from striations.graph import ContractError, Graph
from striations.ordering import Ordering

__all__ = [
    "Raster",
    "RenderSpec",
    "rasterize",
    "tile_and_stitch",
    "colormap",
    "write_ppm",
    "read_ppm",
    "PPMError",
]

log = logging.getLogger(__name__)

LOW = (255, 237, 160)
HIGH = (189, 0, 38)
WHITE = (255, 255, 255)
BLACK = (0, 0, 0)

# incremented whenever colormap() clamps an out-of-range value
clamp_count = 0


class PPMError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Raster:
    """``pixels`` has shape (height, width, 3), dtype uint8, row-major."""

    width: int
    height: int
    pixels: np.ndarray

    @classmethod
    def blank(cls, width: int, height: int, background=WHITE) -> Raster:
        px = np.empty((height, width, 3), dtype=np.uint8)
        px[...] = background
        return cls(width, height, px)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Raster):
            return NotImplemented
        return self.width == other.width and self.height == other.height and np.array_equal(self.pixels, other.pixels)

    __hash__ = None

    def nonbackground(self, background=WHITE) -> np.ndarray:
        return (self.pixels != np.asarray(background, dtype=np.uint8)).any(axis=2)


@dataclass(frozen=True)
class RenderSpec:
    """How cells become pixels.

    cell_color:
      ``pagerank_sum``  score(u) + score(v), divided by the largest such
                        sum in the image, through the low->high colour ramp
      ``degree_class``  high anchor when the column node has degree >=
                        ``degree_threshold``, low anchor otherwise
      ``flat``          every cell drawn in ``flat_color``
    bin_reduce: ``max`` keeps the largest cell value landing on a pixel;
      ``count`` colours pixels by cell count over the busiest pixel and
      ignores ``cell_color``.
    """

    width: int = 1000
    cell_color: str = "pagerank_sum"
    low: tuple[int, int, int] = LOW
    high: tuple[int, int, int] = HIGH
    degree_threshold: int = 10
    bin_reduce: str = "max"
    background: tuple[int, int, int] = WHITE
    flat_color: tuple[int, int, int] = BLACK

    def __post_init__(self):
        if self.width < 1:
            raise ContractError("image width must be at least 1")
        if self.cell_color not in ("pagerank_sum", "degree_class", "flat"):
            raise ContractError(f"unknown cell_color {self.cell_color!r}")
        if self.bin_reduce not in ("max", "count"):
            raise ContractError(f"unknown bin_reduce {self.bin_reduce!r}")
        for c in (self.low, self.high, self.background, self.flat_color):
            if len(c) != 3 or any(not 0 <= x <= 255 for x in c):
                raise ContractError(f"invalid RGB {c!r}")


def colormap(value: float, spec: RenderSpec = RenderSpec()) -> tuple[int, int, int]:
    """Linear interpolation between the anchors, rounded half away from zero."""
    global clamp_count
    if not 0.0 <= value <= 1.0:
        clamp_count += 1
        log.warning("colormap value %r clamped to [0, 1]", value)
        value = min(max(value, 0.0), 1.0)
    rgb = _ramp(np.array([value]), spec)[0]
    return tuple(int(c) for c in rgb)


def _ramp(values: np.ndarray, spec: RenderSpec) -> np.ndarray:
    low = np.asarray(spec.low, dtype=np.float64)
    high = np.asarray(spec.high, dtype=np.float64)
    x = low + values[:, None] * (high - low)
    # all channels are non-negative, so floor(x + 0.5) rounds half away from zero
    return np.floor(x + 0.5).astype(np.uint8)


def _check(g: Graph, ordering: Ordering, scores: RankVector | None, spec: RenderSpec):
    if ordering.n != g.n:
        raise ContractError(f"ordering has {ordering.n} nodes, graph has {g.n}")
    if scores is not None and len(scores) != g.n:
        raise ContractError(f"scores have {len(scores)} entries, graph has {g.n}")
    if scores is None and spec.cell_color == "pagerank_sum" and spec.bin_reduce == "max":
        raise ContractError("pagerank_sum colouring needs scores")


def _pixel_of_rank(rank: np.ndarray, n: int, w: int) -> np.ndarray:
    return (rank * w) // n


def _cell_values(g: Graph, u: np.ndarray, v: np.ndarray, scores: np.ndarray | None, spec: RenderSpec) -> np.ndarray:
    if spec.bin_reduce == "count":
        return np.ones(u.size)
    if spec.cell_color == "pagerank_sum":
        return scores[u] + scores[v]
    if spec.cell_color == "degree_class":
        return (g.degree()[v] >= spec.degree_threshold).astype(np.float64)
    return np.ones(u.size)


def _paint(pixels: np.ndarray, flat_idx: np.ndarray, values: np.ndarray, norm: float, spec: RenderSpec) -> None:
    """Reduce cells onto a (h, w, 3) pixel block addressed by flat index."""
    h, w = pixels.shape[:2]
    if flat_idx.size == 0:
        return
    view = pixels.reshape(h * w, 3)
    if spec.bin_reduce == "count":
        counts = np.bincount(flat_idx, minlength=h * w)
        hit = np.flatnonzero(counts)
        view[hit] = _ramp(counts[hit] / norm, spec)
        return
    if spec.cell_color == "flat":
        view[np.unique(flat_idx)] = spec.flat_color
        return
    acc = np.full(h * w, -np.inf)
    np.maximum.at(acc, flat_idx, values / norm)
    hit = np.flatnonzero(acc > -np.inf)
    view[hit] = _ramp(acc[hit], spec)


def rasterize(g: Graph, ordering: Ordering, scores: RankVector | None, spec: RenderSpec) -> Raster:
    """Render the whole ordered matrix in one pass."""
    _check(g, ordering, scores, spec)
    w = spec.width
    out = Raster.blank(w, w, spec.background)
    if g.n == 0:
        return out
    pos = ordering.position
    u, v = g.arcs()
    rows = _pixel_of_rank(pos[u], g.n, w)
    cols = w - 1 - _pixel_of_rank(pos[v], g.n, w)
    s = None if scores is None else np.asarray(scores.scores, dtype=np.float64)
    values = _cell_values(g, u, v, s, spec)
    flat_idx = rows * w + cols
    if spec.bin_reduce == "count":
        norm = float(np.bincount(flat_idx, minlength=w * w).max()) if flat_idx.size else 1.0
    elif spec.cell_color == "pagerank_sum" and values.size:
        norm = float(values.max())
    else:
        norm = 1.0
    _paint(out.pixels, flat_idx, values, norm if norm > 0 else 1.0, spec)
    return out


class _TileSource:
    """Cells of one horizontal band of tiles, grouped by tile column.

    A band is the contiguous rank range whose rows fall in pixel rows
    [band*T, (band+1)*T).
    """

    def __init__(self, g: Graph, perm: np.ndarray, pos: np.ndarray, scores, spec: RenderSpec, grid: int, band: int):
        n, w = g.n, spec.width
        t = w // grid
        r0 = -(-(band * t * n) // w)
        r1 = -(-((band + 1) * t * n) // w)
        nodes = perm[r0:r1]
        deg = g.degree()[nodes]
        starts = g.indptr[nodes]
        u = np.repeat(nodes, deg)
        offsets = np.arange(u.size) - np.repeat(np.cumsum(deg) - deg, deg)
        v = g.indices[np.repeat(starts, deg) + offsets]
        rows = _pixel_of_rank(pos[u], n, w) - band * t
        cols = w - 1 - _pixel_of_rank(pos[v], n, w)
        tile_col = cols // t
        order = np.argsort(tile_col, kind="stable")
        self.values = _cell_values(g, u, v, scores, spec)[order]
        self.local = (rows * t + cols % t)[order]
        self.bounds = np.searchsorted(tile_col[order], np.arange(grid + 1))
        self.tile = t

    def cells(self, col: int):
        a, b = self.bounds[col], self.bounds[col + 1]
        return self.local[a:b], self.values[a:b]


def _render_tile(src: _TileSource, col: int, norm: float, spec: RenderSpec) -> Raster:
    t = src.tile
    tile = Raster.blank(t, t, spec.background)
    idx, vals = src.cells(col)
    _paint(tile.pixels, idx, vals, norm, spec)
    return tile


def tile_and_stitch(
    g: Graph,
    ordering: Ordering,
    scores: RankVector | None,
    spec: RenderSpec,
    grid: int,
    tile_dir: str | Path | None = None,
    threads: int = 1,
) -> Raster:
    """Render a ``grid`` x ``grid`` mosaic of rank-range blocks and stitch them.

    A first pass finds the global normalisation constant so that every tile
    is coloured on the same scale; the stitched image is then identical to
    :func:`rasterize`. With ``tile_dir`` each tile is written as
    ``tile_<row>_<col>.ppm`` and the mosaic is assembled from those files.
    """
    _check(g, ordering, scores, spec)
    w = spec.width
    if grid < 1 or w % grid:
        raise ValueError(f"grid {grid} must be >= 1 and divide the image width {w}")
    out = Raster.blank(w, w, spec.background)
    if g.n == 0:
        return out
    t = w // grid
    perm = ordering.permutation
    pos = ordering.position
    s = None if scores is None else np.asarray(scores.scores, dtype=np.float64)

    def band(b: int) -> _TileSource:
        return _TileSource(g, perm, pos, s, spec, grid, b)

    def band_norm(b: int) -> float:
        src = band(b)
        if spec.bin_reduce == "count":
            best = 0
            for c in range(grid):
                idx, _ = src.cells(c)
                if idx.size:
                    best = max(best, int(np.bincount(idx).max()))
            return float(best)
        if spec.cell_color == "pagerank_sum" and src.values.size:
            return float(src.values.max())
        return 0.0

    def render_band(b: int, norm: float) -> list[Raster]:
        src = band(b)
        return [_render_tile(src, c, norm, spec) for c in range(grid)]

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        norms = list(pool.map(band_norm, range(grid)))
        norm = max(norms)
        if spec.bin_reduce == "max" and spec.cell_color != "pagerank_sum":
            norm = 1.0
        norm = norm if norm > 0 else 1.0
        bands = list(pool.map(lambda b: render_band(b, norm), range(grid)))

    if tile_dir is not None:
        tile_dir = Path(tile_dir)
        tile_dir.mkdir(parents=True, exist_ok=True)
        for r, row in enumerate(bands):
            for c, tile in enumerate(row):
                (tile_dir / f"tile_{r}_{c}.ppm").write_bytes(write_ppm(tile))
        bands = [
            [read_ppm((tile_dir / f"tile_{r}_{c}.ppm").read_bytes()) for c in range(grid)]
            for r in range(grid)
        ]

    for r, row in enumerate(bands):
        for c, tile in enumerate(row):
            out.pixels[r * t:(r + 1) * t, c * t:(c + 1) * t] = tile.pixels
    return out


def write_ppm(r: Raster) -> bytes:
    header = f"P6\n{r.width} {r.height}\n255\n".encode("ascii")
    return header + np.ascontiguousarray(r.pixels, dtype=np.uint8).tobytes()


def read_ppm(data: bytes) -> Raster:
    """Parse a binary P6 file as written by :func:`write_ppm` (comments allowed)."""
    fields: list[bytes] = []
    i = 0
    while len(fields) < 4:
        while i < len(data) and data[i:i + 1].isspace():
            i += 1
        if data[i:i + 1] == b"#":
            while i < len(data) and data[i:i + 1] != b"\n":
                i += 1
            continue
        j = i
        while j < len(data) and not data[j:j + 1].isspace():
            j += 1
        if j == i:
            raise PPMError("truncated PPM header")
        fields.append(data[i:j])
        i = j
    if fields[0] != b"P6":
        raise PPMError(f"not a binary PPM: magic {fields[0]!r}")
    width, height, maxval = (int(f) for f in fields[1:])
    if maxval != 255:
        raise PPMError("only 8-bit PPM is supported")
    i += 1
    body = data[i:]
    if len(body) != width * height * 3:
        raise PPMError(f"expected {width * height * 3} pixel bytes, got {len(body)}")
    px = np.frombuffer(body, dtype=np.uint8).reshape(height, width, 3).copy()
    return Raster(width, height, px)
