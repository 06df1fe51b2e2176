"""Iterated function systems, the chaos game, and PGM/CSV output.

``FERN`` is the classic four-map Barnsley system. Starting from the origin,
each step draws one uniform number, picks a map by inverting the cumulative
probabilities in list order, and applies it.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from krakos.errors import InvalidInput, InvalidOptions, NoFixedPoint
from krakos.qmat import check_seed

PROBABILITY_TOL = 1e-12


class Point2(NamedTuple):
    x: float
    y: float


class BBox(NamedTuple):
    xmin: float
    xmax: float
    ymin: float
    ymax: float


FERN_BBOX = BBox(-2.20, 2.70, -0.01, 10.00)


@dataclass(frozen=True)
class AffineMap:
    """``p -> linear @ p + offset`` chosen with ``probability``."""

    linear: tuple[tuple[float, float], tuple[float, float]]
    offset: tuple[float, float]
    probability: float

    def __post_init__(self):
        if len(self.linear) != 2 or any(len(r) != 2 for r in self.linear) or len(self.offset) != 2:
            raise InvalidInput("affine map needs a 2x2 linear part and a 2-vector offset")
        values = [*self.linear[0], *self.linear[1], *self.offset, self.probability]
        if not all(math.isfinite(v) for v in values):
            raise InvalidInput("affine map entries must be finite")
        if not 0.0 <= self.probability <= 1.0:
            raise InvalidInput(f"probability {self.probability} outside [0, 1]")


@dataclass(frozen=True)
class IfsSystem:
    maps: tuple[AffineMap, ...]

    def __post_init__(self):
        if not self.maps:
            raise InvalidInput("an IFS needs at least one map")
        total = math.fsum(m.probability for m in self.maps)
        if abs(total - 1.0) > PROBABILITY_TOL:
            raise InvalidInput(f"map probabilities sum to {total!r}, not 1")

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([m.probability for m in self.maps])

    def to_dict(self) -> dict:
        return {
            "maps": [
                {"linear": [list(r) for r in m.linear], "offset": list(m.offset), "probability": m.probability}
                for m in self.maps
            ]
        }

    @classmethod
    def from_dict(cls, doc: dict) -> IfsSystem:
        try:
            maps = tuple(
                AffineMap(
                    tuple(tuple(float(v) for v in row) for row in m["linear"]),
                    tuple(float(v) for v in m["offset"]),
                    float(m["probability"]),
                )
                for m in doc["maps"]
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInput(f"malformed IFS description: {exc}") from None
        return cls(maps)

    @classmethod
    def load(cls, path: str | Path) -> IfsSystem:
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"IFS file is not valid JSON: {exc}") from None
        return cls.from_dict(doc)


FERN = IfsSystem((
    AffineMap(((0.0, 0.0), (0.0, 0.16)), (0.0, 0.0), 0.01),
    AffineMap(((0.85, 0.04), (-0.04, 0.85)), (0.0, 1.6), 0.85),
    AffineMap(((0.2, -0.26), (0.23, 0.22)), (0.0, 1.6), 0.07),
    AffineMap(((-0.15, 0.28), (0.26, 0.24)), (0.0, 0.44), 0.07),
))


def apply_map(m: AffineMap, p: Sequence[float]) -> Point2:
    (a, b), (c, d) = m.linear
    x, y = p
    return Point2(a * x + b * y + m.offset[0], c * x + d * y + m.offset[1])


def fixed_point(m: AffineMap) -> Point2:
    """Solve ``(I - linear) p = offset`` by 2x2 elimination."""
    (a, b), (c, d) = m.linear
    a, b, c, d = 1.0 - a, -b, -c, 1.0 - d
    det = a * d - b * c
    if abs(det) < 1e-12:
        raise NoFixedPoint(f"I - linear is singular (determinant {det:.3e})")
    e, f = m.offset
    return Point2((e * d - b * f) / det, (a * f - c * e) / det)


def _check_counts(iterations: int, burn_in: int) -> None:
    if burn_in < 0 or iterations <= burn_in:
        raise InvalidOptions(f"need iterations > burn_in >= 0, got {iterations} and {burn_in}")


def chaos_trajectory(sys: IfsSystem, iterations: int, burn_in: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Points (shape ``(iterations - burn_in, 2)``) and the map index chosen at every step."""
    _check_counts(iterations, burn_in)
    rng = np.random.default_rng(check_seed(seed))
    cumulative = np.cumsum(sys.probabilities)
    cumulative[-1] = 1.0
    choices = np.searchsorted(cumulative, rng.random(iterations), side="right")
    choices = np.minimum(choices, len(sys.maps) - 1)
    coeffs = [(m.linear[0][0], m.linear[0][1], m.linear[1][0], m.linear[1][1], *m.offset) for m in sys.maps]
    out = np.empty((iterations, 2))
    x = y = 0.0
    for i, k in enumerate(choices.tolist()):
        a, b, c, d, e, f = coeffs[k]
        x, y = a * x + b * y + e, c * x + d * y + f
        out[i, 0] = x
        out[i, 1] = y
    return out[burn_in:], choices


def chaos_game(sys: IfsSystem, iterations: int, burn_in: int = 100, seed: int = 0) -> np.ndarray:
    """Run the chaos game from (0, 0); rows of the result are (x, y) points in order."""
    return chaos_trajectory(sys, iterations, burn_in, seed)[0]


def hit_counts(points, width: int, height: int, bbox: BBox = FERN_BBOX) -> np.ndarray:
    """Per-pixel hit counts; row 0 is the top of ``bbox``."""
    if width < 1 or height < 1:
        raise InvalidOptions(f"raster size must be positive, got {width}x{height}")
    xmin, xmax, ymin, ymax = bbox
    if not (xmax > xmin and ymax > ymin):
        raise InvalidOptions(f"degenerate bounding box {tuple(bbox)}")
    grid = np.zeros((height, width), dtype=np.int64)
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if not len(pts):
        return grid
    x, y = pts[:, 0], pts[:, 1]
    inside = (x >= xmin) & (x <= xmax) & (y >= ymin) & (y <= ymax)
    col = np.minimum(((x[inside] - xmin) / (xmax - xmin) * width).astype(np.int64), width - 1)
    row = np.minimum(((ymax - y[inside]) / (ymax - ymin) * height).astype(np.int64), height - 1)
    np.add.at(grid, (row, col), 1)
    return grid


def rasterize(points, width: int, height: int, bbox: BBox = FERN_BBOX) -> np.ndarray:
    """Grayscale image of log(1 + hits), scaled so the busiest pixel is 255."""
    hits = hit_counts(points, width, height, bbox)
    peak = int(hits.max())
    if peak == 0:
        return np.zeros_like(hits, dtype=np.uint8)
    scaled = np.log1p(hits) / math.log1p(peak) * 255.0
    return np.rint(scaled).astype(np.uint8)


def pgm_bytes(image: np.ndarray) -> bytes:
    """Plain (P2) PGM, max value 255, at most 70 characters per line."""
    height, width = image.shape
    buf = io.StringIO()
    buf.write(f"P2\n{width} {height}\n255\n")
    for row in image.tolist():
        line = ""
        for v in row:
            token = str(v)
            if line and len(line) + 1 + len(token) > 70:
                buf.write(line + "\n")
                line = token
            else:
                line = f"{line} {token}" if line else token
        buf.write(line + "\n")
    return buf.getvalue().encode("ascii")


def write_pgm(path: str | Path, image: np.ndarray) -> None:
    Path(path).write_bytes(pgm_bytes(image))


def read_pgm(path: str | Path) -> np.ndarray:
    tokens = Path(path).read_text().split()
    if tokens[0] != "P2":
        raise InvalidInput(f"not a plain PGM file (magic {tokens[0]!r})")
    width, height = int(tokens[1]), int(tokens[2])
    data = np.array(tokens[4:4 + width * height], dtype=np.int64)
    return data.reshape(height, width)


def csv_text(points) -> str:
    lines = ["x,y"]
    lines.extend(f"{x:.6f},{y:.6f}" for x, y in np.asarray(points).tolist())
    return "\n".join(lines) + "\n"


def write_csv(path: str | Path, points) -> None:
    Path(path).write_text(csv_text(points))


@dataclass(frozen=True)
class FernStats:
    iterations: int
    burn_in: int
    seed: int
    points: int
    map_counts: tuple[int, ...]
    bbox: BBox
    inside_fraction: float
    x_range: tuple[float, float]
    y_range: tuple[float, float]
    nonzero_fraction: float
    width: int
    height: int


def fern_stats(sys: IfsSystem, iterations: int, burn_in: int, seed: int,
               width: int = 400, height: int = 800, bbox: BBox = FERN_BBOX) -> tuple[FernStats, np.ndarray, np.ndarray]:
    """Run the chaos game and summarise it; also returns the points and raster."""
    points, choices = chaos_trajectory(sys, iterations, burn_in, seed)
    image = rasterize(points, width, height, bbox)
    x, y = points[:, 0], points[:, 1]
    inside = (x >= bbox.xmin) & (x <= bbox.xmax) & (y >= bbox.ymin) & (y <= bbox.ymax)
    counts = np.bincount(choices[burn_in:], minlength=len(sys.maps))
    stats = FernStats(
        iterations=iterations,
        burn_in=burn_in,
        seed=seed,
        points=len(points),
        map_counts=tuple(int(c) for c in counts),
        bbox=bbox,
        inside_fraction=float(inside.mean()),
        x_range=(float(x.min()), float(x.max())),
        y_range=(float(y.min()), float(y.max())),
        nonzero_fraction=float(np.count_nonzero(image) / image.size),
        width=width,
        height=height,
    )
    return stats, points, image
