"""Exact k-nearest-neighbor search, blocked for large clouds.

Distances use the expanded form ||a||^2 + ||b||^2 - 2 a.b with a
clamp at zero before the square root. Ties break toward the lower
index, so repeated runs (any worker count) produce identical tables.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import KTooLarge, RangeOutOfBounds
from .types import NeighborTable, PointCloud

_BLOCK = 512


def pairwise_distance_block(cloud: PointCloud, row_range, col_range):
    """Exact Euclidean distances between two index ranges of the cloud."""
    n = cloud.n
    r0, r1 = row_range
    c0, c1 = col_range
    if not (0 <= r0 <= r1 <= n and 0 <= c0 <= c1 <= n):
        raise RangeOutOfBounds(f"ranges {row_range}, {col_range} invalid for n={n}")
    A = cloud.points[r0:r1]
    B = cloud.points[c0:c1]
    sq = (
        np.sum(A * A, axis=1)[:, None]
        + np.sum(B * B, axis=1)[None, :]
        - 2.0 * (A @ B.T)
    )
    np.maximum(sq, 0.0, out=sq)
    return np.sqrt(sq)


def _knn_rows(cloud, k, r0, r1, out_idx, out_dst):
    n = cloud.n
    dist = np.empty((r1 - r0, n))
    for c0 in range(0, n, _BLOCK):
        c1 = min(c0 + _BLOCK, n)
        dist[:, c0:c1] = pairwise_distance_block(cloud, (r0, r1), (c0, c1))
    rows = np.arange(r0, r1)
    dist[np.arange(r1 - r0), rows] = np.inf  # exclude self
    # stable argsort on distance keeps the lower index first on ties
    order = np.argsort(dist, axis=1, kind="stable")[:, :k]
    # recompute the kept distances from direct differences: the expanded
    # form loses precision for points much closer than their norms
    diffs = cloud.points[order] - cloud.points[r0:r1, None, :]
    exact = np.linalg.norm(diffs, axis=2)
    resort = np.argsort(exact, axis=1, kind="stable")
    out_idx[r0:r1] = np.take_along_axis(order, resort, axis=1)
    out_dst[r0:r1] = np.take_along_axis(exact, resort, axis=1)


def build_neighbor_table(cloud: PointCloud, k: int, workers: int = 1) -> NeighborTable:
    """Exact Euclidean k-NN per point, sorted ascending, self excluded."""
    n = cloud.n
    if not (1 <= k <= n - 1):
        raise KTooLarge(f"k={k} must satisfy 1 <= k <= n-1 (n={n})")
    out_idx = np.empty((n, k), dtype=np.int64)
    out_dst = np.empty((n, k), dtype=np.float64)
    spans = [(r0, min(r0 + _BLOCK, n)) for r0 in range(0, n, _BLOCK)]
    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futs = [
                pool.submit(_knn_rows, cloud, k, r0, r1, out_idx, out_dst)
                for r0, r1 in spans
            ]
            for f in futs:
                f.result()
    else:
        for r0, r1 in spans:
            _knn_rows(cloud, k, r0, r1, out_idx, out_dst)
    return NeighborTable(out_idx, out_dst)
