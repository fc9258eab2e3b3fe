"""Shared domain types.

All arrays are stored as float64 internally regardless of on-disk
precision. Instances are immutable after construction and safe to share
across workers.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    NonFiniteEntry,
    TooFewPoints,
)


def _as_f64(a):
    return np.ascontiguousarray(np.asarray(a, dtype=np.float64))


@dataclass(frozen=True)
class PointCloud:
    """An n x d matrix of hidden-state vectors for one layer."""

    points: np.ndarray
    layer_index: int = 0
    source_id: str = ""

    def __post_init__(self):
        pts = _as_f64(self.points)
        if pts.ndim != 2:
            raise TooFewPoints(f"expected a 2-d matrix, got shape {pts.shape}")
        if pts.shape[0] < 2:
            raise TooFewPoints(f"need n >= 2 points, got {pts.shape[0]}")
        if pts.shape[1] < 1:
            raise TooFewPoints("need d >= 1")
        if not np.all(np.isfinite(pts)):
            raise NonFiniteEntry("point cloud contains NaN or Inf")
        if self.layer_index < 0:
            raise ValueError("layer_index must be >= 0")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def d(self):
        return self.points.shape[1]


def validate_cloud(cloud: PointCloud) -> PointCloud:
    """Return the cloud iff all invariants hold (checked at construction)."""
    if not isinstance(cloud, PointCloud):
        return PointCloud(np.asarray(cloud))
    return cloud


@dataclass(frozen=True)
class UnembeddingHead:
    """The N x d logit matrix W and optional length-N bias b."""

    W: np.ndarray
    b: np.ndarray | None = None

    def __post_init__(self):
        W = _as_f64(self.W)
        if W.ndim != 2 or W.shape[0] < 2:
            raise TooFewPoints(f"W must be N x d with N >= 2, got {W.shape}")
        if not np.all(np.isfinite(W)):
            raise NonFiniteEntry("W contains NaN or Inf")
        W.setflags(write=False)
        object.__setattr__(self, "W", W)
        if self.b is not None:
            b = _as_f64(self.b).ravel()
            if b.shape[0] != W.shape[0]:
                raise ValueError(
                    f"bias length {b.shape[0]} != vocab size {W.shape[0]}"
                )
            if not np.all(np.isfinite(b)):
                raise NonFiniteEntry("b contains NaN or Inf")
            b.setflags(write=False)
            object.__setattr__(self, "b", b)

    @property
    def vocab_size(self):
        return self.W.shape[0]

    @property
    def d(self):
        return self.W.shape[1]


@dataclass(frozen=True)
class NeighborTable:
    """Per-point sorted k-nearest-neighbor indices and distances."""

    indices: np.ndarray    # n x k int64
    distances: np.ndarray  # n x k float64, sorted nondecreasing per row

    def __post_init__(self):
        idx = np.ascontiguousarray(np.asarray(self.indices, dtype=np.int64))
        dst = _as_f64(self.distances)
        if idx.shape != dst.shape or idx.ndim != 2:
            raise ValueError("indices and distances must share an n x k shape")
        if np.any(dst < 0) or not np.all(np.isfinite(dst)):
            raise NonFiniteEntry("distances must be finite and nonnegative")
        if np.any(np.diff(dst, axis=1) < 0):
            raise ValueError("per-point distances must be sorted nondecreasing")
        n = idx.shape[0]
        if np.any(idx == np.arange(n)[:, None]):
            raise ValueError("a point may not be its own neighbor")
        if np.any(idx < 0) or np.any(idx >= n):
            raise ValueError("neighbor index out of range")
        idx.setflags(write=False)
        dst.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "distances", dst)

    @property
    def n(self):
        return self.indices.shape[0]

    @property
    def k(self):
        return self.indices.shape[1]


@dataclass(frozen=True)
class DimensionEstimate:
    value: float
    estimator: str      # "two_nn" | "mle"
    n_used: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.value > 0):
            raise ValueError("dimension estimate must be positive")
        if self.estimator not in ("two_nn", "mle"):
            raise ValueError(f"unknown estimator tag {self.estimator!r}")


@dataclass(frozen=True)
class MarginSample:
    margin: float
    top_token: int
    runner_up_token: int
    entropy: float

    def __post_init__(self):
        if self.top_token == self.runner_up_token:
            raise ValueError("top and runner-up token must differ")
        if self.margin < 0:
            raise ValueError("margin must be >= 0")


@dataclass(frozen=True)
class GapCurve:
    epsilons: np.ndarray
    etas: np.ndarray
    fit: dict | None = None  # {"slope", "intercept", "r_squared", "eps_min", "eps_max"}

    def __post_init__(self):
        eps = _as_f64(self.epsilons)
        eta = _as_f64(self.etas)
        if eps.shape != eta.shape:
            raise ValueError("epsilons and etas must have equal length")
        if np.any(eps <= 0) or np.any(np.diff(eps) <= 0):
            raise ValueError("epsilon grid must be positive and increasing")
        if np.any(eta < 0) or np.any(eta > 1):
            raise ValueError("eta values must lie in [0, 1]")
        if np.any(np.diff(eta) < 0):
            raise ValueError("eta must be nondecreasing in epsilon")
        if self.fit is not None:
            r2 = self.fit["r_squared"]
            if not (0.0 <= r2 <= 1.0):
                raise ValueError("r_squared must lie in [0, 1]")
        eps.setflags(write=False)
        eta.setflags(write=False)
        object.__setattr__(self, "epsilons", eps)
        object.__setattr__(self, "etas", eta)


@dataclass(frozen=True)
class FisherMatrix:
    """A d x d Fisher information matrix evaluated at one hidden state."""

    G: np.ndarray
    at_point: np.ndarray

    def __post_init__(self):
        G = _as_f64(self.G)
        h = _as_f64(self.at_point).ravel()
        if G.ndim != 2 or G.shape[0] != G.shape[1]:
            raise ValueError("G must be square")
        scale = np.max(np.abs(G)) if G.size else 0.0
        if scale > 0 and np.max(np.abs(G - G.T)) > 1e-10 * scale:
            raise ValueError("G must be symmetric to 1e-10 relative tolerance")
        G = 0.5 * (G + G.T)
        evals = np.linalg.eigvalsh(G)
        if evals[0] < -1e-8 * max(evals[-1], 0.0):
            raise ValueError("G must be positive semidefinite")
        G.setflags(write=False)
        h.setflags(write=False)
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "at_point", h)

    @property
    def d(self):
        return self.G.shape[0]


@dataclass(frozen=True)
class Codebook:
    """Quantizer state: codewords, per-sample assignment, mean sq distortion."""

    codewords: np.ndarray
    assignment: np.ndarray
    distortion: float

    def __post_init__(self):
        cw = _as_f64(self.codewords)
        asg = np.ascontiguousarray(np.asarray(self.assignment, dtype=np.int64))
        if cw.ndim != 2:
            raise ValueError("codewords must be an M x d matrix")
        if np.any(asg < 0) or np.any(asg >= cw.shape[0]):
            raise ValueError("assignment index out of range")
        cw.setflags(write=False)
        asg.setflags(write=False)
        object.__setattr__(self, "codewords", cw)
        object.__setattr__(self, "assignment", asg)

    @property
    def size(self):
        return self.codewords.shape[0]
