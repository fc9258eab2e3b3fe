"""Local curvature proxies.

Two per-point quantities: the residual variance fraction of a local
PCA (how much variance escapes the dominant principal subspace), and a
second-fundamental-form norm proxy from the rotation rate of the local
tangent plane between neighboring points.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTangent, NeighborhoodTooSmall
from .types import NeighborTable, PointCloud

DEFAULT_TANGENT_NEIGHBORS = 5


@dataclass(frozen=True)
class CurvatureSample:
    point_index: int
    pca_curvature: float   # residual variance fraction in [0, 1]
    ii_norm: float         # tangent rotation per unit distance, >= 0


def _neighborhoods(cloud, table, neighborhood_size):
    if neighborhood_size > table.k:
        raise NeighborhoodTooSmall(
            f"neighborhood_size={neighborhood_size} exceeds table k={table.k}"
        )
    return table.indices[:, :neighborhood_size]


def _local_eig(cloud, idx_row, center_index):
    """Eigendecomposition of the centered local covariance, descending."""
    pts = cloud.points[np.concatenate(([center_index], idx_row))]
    pts = pts - pts.mean(axis=0)
    cov = (pts.T @ pts) / pts.shape[0]
    evals, evecs = np.linalg.eigh(cov)
    return evals[::-1], evecs[:, ::-1]


def local_pca_curvature(
    cloud: PointCloud,
    table: NeighborTable,
    neighborhood_size: int,
    intrinsic_k: int,
):
    """Residual variance fraction beyond the top intrinsic_k directions."""
    if not (neighborhood_size > intrinsic_k >= 1):
        raise NeighborhoodTooSmall("need neighborhood_size > intrinsic_k >= 1")
    nbrs = _neighborhoods(cloud, table, neighborhood_size)
    out = []
    for i in range(cloud.n):
        evals, _ = _local_eig(cloud, nbrs[i], i)
        total = float(np.sum(evals))
        resid = 0.0 if total <= 0 else float(np.sum(evals[intrinsic_k:])) / total
        out.append(CurvatureSample(i, max(resid, 0.0), 0.0))
    return out


def _tangent_basis(cloud, nbrs, i, intrinsic_k):
    evals, evecs = _local_eig(cloud, nbrs[i], i)
    if evals[intrinsic_k - 1] <= 1e-300:
        raise DegenerateTangent(f"rank-deficient neighborhood at point {i}")
    return evecs[:, :intrinsic_k]


def largest_principal_angle(B0, B1):
    """Largest principal angle between two orthonormal bases, in [0, pi/2].

    Computed through the sine (norm of the complement projection) so
    that near-zero angles do not lose precision in arccos.
    """
    resid = B1 - B0 @ (B0.T @ B1)
    s = np.linalg.svd(resid, compute_uv=False)
    return float(np.arcsin(min(float(s[0]), 1.0)))


def second_fundamental_norm(
    cloud: PointCloud,
    table: NeighborTable,
    neighborhood_size: int,
    intrinsic_k: int,
    m: int = DEFAULT_TANGENT_NEIGHBORS,
):
    """Tangent-plane rotation per unit distance, averaged over m neighbors."""
    if not (neighborhood_size > intrinsic_k >= 1):
        raise NeighborhoodTooSmall("need neighborhood_size > intrinsic_k >= 1")
    nbrs = _neighborhoods(cloud, table, neighborhood_size)
    m = min(m, table.k)
    bases = [_tangent_basis(cloud, nbrs, i, intrinsic_k) for i in range(cloud.n)]
    out = []
    for i in range(cloud.n):
        rates = []
        for j_pos in range(m):
            j = table.indices[i, j_pos]
            dist = table.distances[i, j_pos]
            if dist <= 0:
                raise DegenerateTangent(f"coincident points {i} and {j}")
            angle = largest_principal_angle(bases[i], bases[j])
            rates.append(angle / dist)
        out.append(CurvatureSample(i, 0.0, float(np.mean(rates))))
    return out


def default_neighborhood_size(intrinsic_k: int) -> int:
    return max(2 * intrinsic_k, 20)
