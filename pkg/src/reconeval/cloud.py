"""Point-cloud container, spatial index, and core geometry operations.

Coordinates are held as float64 regardless of on-disk precision so that
registration and metric accumulators keep numerical headroom. Clouds and
indices are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import (
    CloudTooSmall,
    EmptyCloud,
    EmptyResult,
    NonFiniteCoordinate,
    NonPositiveVoxel,
)

__all__ = [
    "PointCloud",
    "Aabb",
    "NnIndex",
    "build_index",
    "crop",
    "voxel_downsample",
    "remove_statistical_outliers",
    "remove_duplicate_points",
]

# Outlier-removal defaults; override per scene via config.
DEFAULT_OUTLIER_K = 20
DEFAULT_OUTLIER_SIGMA = 2.0


@dataclass(frozen=True, eq=False)
class PointCloud:
    """An ordered set of 3D points with optional per-point RGB color.

    ``points`` is an (n, 3) float64 array; ``colors`` is either None or a
    parallel (n, 3) uint8 array. Arrays are frozen (non-writeable) on
    construction.
    """

    points: np.ndarray
    colors: np.ndarray | None = None
    label: str = ""

    def __post_init__(self) -> None:
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=np.float64))
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError(f"points must be (n, 3), got {pts.shape}")
        if pts.size and not np.isfinite(pts).all():
            raise NonFiniteCoordinate("point coordinates must be finite")
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)
        if self.colors is not None:
            cols = np.ascontiguousarray(np.asarray(self.colors, dtype=np.uint8))
            if cols.shape != (len(pts), 3):
                raise ValueError(
                    f"colors must be ({len(pts)}, 3), got {cols.shape}"
                )
            cols.flags.writeable = False
            object.__setattr__(self, "colors", cols)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def has_colors(self) -> bool:
        return self.colors is not None

    def select(self, index: np.ndarray, label: str | None = None) -> "PointCloud":
        """Subset by integer indices or boolean mask, preserving order and colors."""
        cols = self.colors[index] if self.colors is not None else None
        return PointCloud(self.points[index], cols, self.label if label is None else label)

    def bounds(self) -> "Aabb":
        if len(self) == 0:
            raise EmptyCloud("empty cloud has no bounding box")
        return Aabb(self.points.min(axis=0), self.points.max(axis=0))


@dataclass(frozen=True, eq=False)
class Aabb:
    """Axis-aligned bounding box with inclusive bounds."""

    min_corner: np.ndarray
    max_corner: np.ndarray

    def __post_init__(self) -> None:
        lo = np.asarray(self.min_corner, dtype=np.float64).reshape(3)
        hi = np.asarray(self.max_corner, dtype=np.float64).reshape(3)
        if not (np.isfinite(lo).all() and np.isfinite(hi).all()):
            raise ValueError("box corners must be finite")
        if (lo > hi).any():
            raise ValueError("min corner must be <= max corner componentwise")
        lo.flags.writeable = False
        hi.flags.writeable = False
        object.__setattr__(self, "min_corner", lo)
        object.__setattr__(self, "max_corner", hi)

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of points inside the box (boundary inclusive)."""
        pts = np.asarray(points, dtype=np.float64)
        return ((pts >= self.min_corner) & (pts <= self.max_corner)).all(axis=1)


class NnIndex:
    """Exact nearest-neighbor index over one cloud (balanced k-d tree).

    Queries return the true Euclidean nearest point; when several points tie
    on squared distance (float64), the lowest point index wins, so repeated
    runs always produce identical correspondences.
    """

    def __init__(self, cloud: PointCloud):
        if len(cloud) == 0:
            raise EmptyCloud("cannot index an empty cloud")
        self._points = cloud.points
        self._tree = cKDTree(self._points)

    def __len__(self) -> int:
        return len(self._points)

    def _resolve_tie(self, q: np.ndarray, dist: float) -> int:
        # Inflate the found NN distance by a few ulps so every tied point is
        # captured, then decide on the exact squared distances.
        radius = dist * (1.0 + 1e-9) + 1e-300
        cand = np.asarray(self._tree.query_ball_point(q, radius), dtype=np.intp)
        d2 = ((self._points[cand] - q) ** 2).sum(axis=1)
        return int(cand[d2 == d2.min()].min())

    def query(self, point: np.ndarray) -> tuple[int, float]:
        """Nearest point for a single query; returns (index, distance)."""
        idx, dist = self.query_many(np.asarray(point, dtype=np.float64).reshape(1, 3))
        return int(idx[0]), float(dist[0])

    def query_many(
        self, points: np.ndarray, workers: int = 1
    ) -> tuple[np.ndarray, np.ndarray]:
        """Nearest indices and distances for an (n, 3) query array."""
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        if len(self._points) == 1:
            dist, idx = self._tree.query(pts, k=1, workers=workers)
            return idx.astype(np.intp), dist
        dist2, idx2 = self._tree.query(pts, k=2, workers=workers)
        idx = idx2[:, 0].astype(np.intp)
        dist = dist2[:, 0]
        tied = np.nonzero(dist2[:, 0] == dist2[:, 1])[0]
        for row in tied:
            idx[row] = self._resolve_tie(pts[row], dist[row])
        return idx, dist

    def distances(self, points: np.ndarray, workers: int = 1) -> np.ndarray:
        """Nearest-neighbor distance of each query point (no tie resolution needed)."""
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        dist, _ = self._tree.query(pts, k=1, workers=workers)
        return dist


def build_index(cloud: PointCloud) -> NnIndex:
    """Build the exact nearest-neighbor index for a nonempty cloud."""
    return NnIndex(cloud)


def crop(cloud: PointCloud, box: Aabb) -> PointCloud:
    """Keep exactly the points inside ``box`` (boundary inclusive).

    Order and colors are preserved. Raises :class:`EmptyResult` when nothing
    survives, so pipelines abort instead of propagating an empty cloud.
    """
    mask = box.contains(cloud.points)
    if not mask.any():
        raise EmptyResult("crop box contains no points")
    return cloud.select(mask)


def voxel_downsample(cloud: PointCloud, voxel: float) -> PointCloud:
    """Replace each occupied voxel by the centroid of its points.

    The grid is anchored at the cloud's own min corner: the voxel key of a
    point p is floor((p - min) / voxel) per axis. Output points are ordered
    by lexicographic voxel key. Colors are dropped (centroids are synthetic).
    """
    if not (voxel > 0):
        raise NonPositiveVoxel(f"voxel size must be > 0, got {voxel}")
    if len(cloud) == 0:
        raise EmptyCloud("cannot downsample an empty cloud")
    pts = cloud.points
    keys = np.floor((pts - pts.min(axis=0)) / voxel).astype(np.int64)
    uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    sums = np.zeros((len(uniq), 3), dtype=np.float64)
    np.add.at(sums, inverse, pts)
    counts = np.bincount(inverse, minlength=len(uniq)).astype(np.float64)
    return PointCloud(sums / counts[:, None], label=cloud.label)


def remove_statistical_outliers(
    cloud: PointCloud,
    k: int = DEFAULT_OUTLIER_K,
    sigma: float = DEFAULT_OUTLIER_SIGMA,
) -> PointCloud:
    """Drop points whose mean k-NN distance exceeds the global mean + sigma*std.

    For each point the mean distance to its k nearest neighbors (self
    excluded) is computed; a point is kept iff that mean is <= mu + sigma*s,
    where mu and s are the mean and population std of the per-point means.
    ``sigma=inf`` is the keep-all sentinel.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if len(cloud) <= k:
        raise CloudTooSmall(f"need more than k={k} points, got {len(cloud)}")
    if math.isinf(sigma):
        return cloud
    tree = cKDTree(cloud.points)
    # k+1 neighbors include the query point itself at distance 0.
    dist, _ = tree.query(cloud.points, k=k + 1)
    means = dist[:, 1:].mean(axis=1)
    cutoff = means.mean() + sigma * means.std()
    return cloud.select(means <= cutoff)


def remove_duplicate_points(cloud: PointCloud) -> PointCloud:
    """Drop exact-coordinate duplicates, keeping the first occurrence in order."""
    if len(cloud) == 0:
        return cloud
    _, first = np.unique(cloud.points, axis=0, return_index=True)
    return cloud.select(np.sort(first))
