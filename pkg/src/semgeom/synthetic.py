"""Ground-truth manifold samplers and theorem validation experiments.

Provides uniform samplers with known intrinsic dimension, the unit-ball
quantization constant and distortion lower bound, a Lloyd quantizer,
greedy codebook expansion, a planar margin-field experiment testing the
linear gap-scaling law, and a sphere geodesic-vs-chord error probe.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree
from scipy.special import gammaln

from .errors import AntipodalPoints, BadParameters, TooFewSamples
from .types import Codebook, GapCurve, PointCloud


@dataclass(frozen=True)
class SyntheticManifold:
    kind: str           # sphere | cube | torus | swiss_roll
    intrinsic_k: int
    ambient_d: int
    scale: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("sphere", "cube", "torus", "swiss_roll"):
            raise BadParameters(f"unknown manifold kind {self.kind!r}")
        min_embed = self._embedding_dim()
        if self.ambient_d < min_embed:
            raise BadParameters(
                f"{self.kind} with k={self.intrinsic_k} needs ambient_d >= {min_embed}"
            )
        if self.intrinsic_k < 1 or self.scale <= 0:
            raise BadParameters("need intrinsic_k >= 1 and scale > 0")

    def _embedding_dim(self):
        if self.kind == "sphere":
            return self.intrinsic_k + 1
        if self.kind == "cube":
            return self.intrinsic_k
        if self.kind == "torus":
            return 3
        return 3  # swiss_roll


def _raw_samples(manifold: SyntheticManifold, n, rng):
    k, s = manifold.intrinsic_k, manifold.scale
    if manifold.kind == "sphere":
        g = rng.standard_normal((n, k + 1))
        return s * g / np.linalg.norm(g, axis=1, keepdims=True)
    if manifold.kind == "cube":
        return s * rng.uniform(0.0, 1.0, size=(n, k))
    if manifold.kind == "torus":
        if k != 2:
            raise BadParameters("torus sampler supports intrinsic_k = 2 only")
        R, r = 2.0 * s, s
        # rejection sampling for uniform area measure on the torus
        out = np.empty((n, 3))
        filled = 0
        while filled < n:
            u = rng.uniform(0, 2 * np.pi, size=2 * (n - filled))
            v = rng.uniform(0, 2 * np.pi, size=2 * (n - filled))
            accept = rng.uniform(0, 1, size=u.size) < (R + r * np.cos(v)) / (R + r)
            u, v = u[accept], v[accept]
            take = min(u.size, n - filled)
            cu, su = np.cos(u[:take]), np.sin(u[:take])
            cv, sv = np.cos(v[:take]), np.sin(v[:take])
            out[filled : filled + take] = np.column_stack(
                ((R + r * cv) * cu, (R + r * cv) * su, r * sv)
            )
            filled += take
        return out
    if k != 2:
        raise BadParameters("swiss_roll sampler supports intrinsic_k = 2 only")
    t = rng.uniform(1.5 * np.pi, 4.5 * np.pi, size=n)
    y = rng.uniform(0.0, 10.0 * s, size=n)
    return np.column_stack((s * t * np.cos(t), y, s * t * np.sin(t)))


def _orthogonal_map(d, rng):
    Q, R = np.linalg.qr(rng.standard_normal((d, d)))
    return Q * np.sign(np.diag(R))


def sample(manifold: SyntheticManifold, n, seed=None) -> PointCloud:
    """Uniform samples, zero-padded to ambient_d and rotated by a seeded
    random orthogonal map (norm-preserving)."""
    if n < 2:
        raise BadParameters("need n >= 2 samples")
    rng = np.random.default_rng(manifold.seed if seed is None else seed)
    raw = _raw_samples(manifold, n, rng)
    pts = np.zeros((n, manifold.ambient_d))
    pts[:, : raw.shape[1]] = raw
    Q = _orthogonal_map(manifold.ambient_d, rng)
    return PointCloud(pts @ Q.T, source_id=f"{manifold.kind}-k{manifold.intrinsic_k}")


def sample_intrinsic(manifold: SyntheticManifold, n, seed=None):
    """The raw coordinates before embedding, for construction checks."""
    rng = np.random.default_rng(manifold.seed if seed is None else seed)
    return _raw_samples(manifold, n, rng)


def ball_constant(k: int) -> float:
    """c_k = (k/(k+2)) * omega_k^(-2/k), omega_k the unit-ball volume."""
    if k < 1:
        raise BadParameters("k must be >= 1")
    log_omega = (k / 2.0) * np.log(np.pi) - gammaln(k / 2.0 + 1.0)
    return (k / (k + 2.0)) * float(np.exp(-2.0 / k * log_omega))


def distortion_lower_bound(k: int, volume: float, N: int, nu_min: float) -> float:
    """c_k * nu_min * (volume / N)^(2/k)."""
    if k < 1 or volume <= 0 or N < 1 or nu_min <= 0:
        raise BadParameters("all parameters must be positive")
    return ball_constant(k) * nu_min * (volume / N) ** (2.0 / k)


def _assign(X, C):
    if C.shape[1] <= 10 and C.shape[0] >= 8:
        # low ambient dimension: KD-tree assignment is much faster
        dist, asg = cKDTree(C).query(X, k=1)
        return asg.astype(np.int64), dist**2
    d2 = (
        np.sum(X * X, axis=1)[:, None]
        + np.sum(C * C, axis=1)[None, :]
        - 2.0 * (X @ C.T)
    )
    np.maximum(d2, 0.0, out=d2)
    asg = np.argmin(d2, axis=1)
    return asg, d2[np.arange(X.shape[0]), asg]


def _farthest_point_init(X, M, rng):
    n = X.shape[0]
    C = np.empty((M, X.shape[1]))
    C[0] = X[rng.integers(n)]
    d2 = np.sum((X - C[0]) ** 2, axis=1)
    for j in range(1, M):
        C[j] = X[int(np.argmax(d2))]
        d2 = np.minimum(d2, np.sum((X - C[j]) ** 2, axis=1))
    return C


def lloyd_quantize(cloud: PointCloud, M: int, iterations: int = 100, seed: int = 0,
                   tol: float = 1e-6) -> Codebook:
    """K-means with seeded farthest-point init; distortion never increases."""
    X = cloud.points
    n = X.shape[0]
    if M > n:
        raise TooFewSamples(f"M={M} codewords exceed n={n} samples")
    rng = np.random.default_rng(seed)
    C = _farthest_point_init(X, M, rng)
    prev = np.inf
    for _ in range(iterations):
        asg, d2 = _assign(X, C)
        distortion = float(np.mean(d2))
        assert distortion <= prev * (1 + 1e-12), "distortion increased"
        if prev - distortion < tol * max(prev, 1e-300) and np.isfinite(prev):
            break
        prev = distortion
        counts = np.bincount(asg, minlength=M)
        sums = np.zeros_like(C)
        np.add.at(sums, asg, X)
        nonempty = counts > 0
        C[nonempty] = sums[nonempty] / counts[nonempty, None]
        for j in np.flatnonzero(~nonempty):
            # re-seed an empty cluster from the farthest sample
            _, cur = _assign(X, C)
            C[j] = X[int(np.argmax(cur))]
    asg, d2 = _assign(X, C)
    return Codebook(C, asg, float(np.mean(d2)))


def greedy_expand(codebook: Codebook, cloud: PointCloud,
                  candidate_pool_size: int = 256, seed: int = 0):
    """Add the candidate sample point that maximizes distortion reduction.

    Returns (new_codebook, improved). If no candidate reduces distortion
    the input codebook is returned unchanged with improved = False.
    """
    if candidate_pool_size < 1:
        raise BadParameters("candidate_pool_size must be >= 1")
    X = cloud.points
    rng = np.random.default_rng(seed)
    pool = rng.choice(X.shape[0], size=min(candidate_pool_size, X.shape[0]),
                      replace=False)
    _, cur_d2 = _assign(X, codebook.codewords)
    cand = X[pool]
    d2_new = (
        np.sum(X * X, axis=1)[None, :]
        + np.sum(cand * cand, axis=1)[:, None]
        - 2.0 * (cand @ X.T)
    )
    np.maximum(d2_new, 0.0, out=d2_new)
    gains = np.sum(np.maximum(cur_d2[None, :] - d2_new, 0.0), axis=1)
    best = int(np.argmax(gains))
    if gains[best] <= 0:
        return codebook, False
    C = np.vstack([codebook.codewords, cand[best]])
    asg, d2 = _assign(X, C)
    new = Codebook(C, asg, float(np.mean(d2)))
    assert new.distortion <= codebook.distortion * (1 + 1e-12)
    return new, True


def _segment_set(L):
    """Vertical segments of total length L inside the unit square."""
    if L <= 0:
        raise BadParameters("boundary length must be positive")
    m = max(1, int(np.ceil(L)))
    seg_len = L / m
    xs = (np.arange(m) + 1.0) / (m + 1.0) if m > 1 else np.array([0.5])
    y0 = 0.5 - seg_len / 2.0
    y1 = 0.5 + seg_len / 2.0
    return [(x, y0, y1) for x in xs]


def _dist_to_segments(pts, segments):
    d = np.full(pts.shape[0], np.inf)
    for x, y0, y1 in segments:
        dy = np.clip(pts[:, 1], y0, y1)
        d = np.minimum(d, np.hypot(pts[:, 0] - x, pts[:, 1] - dy))
    return d


def planar_gap_experiment(boundary_length: float, lam: float, epsilon_grid,
                          n_samples: int = 100_000, seed: int = 0):
    """Monte Carlo gap curve for a distance margin field on the unit square.

    The margin is lam * dist(h, segment set of total length L), so the
    sublevel set {m < eps} is a two-sided tube of width 2 eps / lam and
    the predicted small-eps slope of eta is 2 L / lam.
    """
    if lam <= 0 or n_samples < 1:
        raise BadParameters("lam and n_samples must be positive")
    eps = np.asarray(epsilon_grid, dtype=np.float64)
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.0, 1.0, size=(n_samples, 2))
    margins = lam * _dist_to_segments(pts, _segment_set(boundary_length))
    sorted_m = np.sort(margins)
    etas = np.searchsorted(sorted_m, eps, side="left") / n_samples
    measured = GapCurve(eps, etas)
    predicted_slope = 2.0 * boundary_length / lam
    return {
        "curve": measured,
        "predicted_slope": predicted_slope,
        "predicted_etas": np.minimum(predicted_slope * eps, 1.0),
    }


def fit_linear_slope(curve: GapCurve, eps_min: float, eps_max: float):
    """Least-squares line of eta on eps over a sub-range, with r^2."""
    mask = (curve.epsilons >= eps_min) & (curve.epsilons <= eps_max)
    x = curve.epsilons[mask]
    y = curve.etas[mask]
    if x.size < 3:
        raise BadParameters("need >= 3 grid points in the fit range")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return {"slope": float(slope), "intercept": float(intercept), "r_squared": r2}


def sphere_interp_error(h0, h1, lambda_grid=None):
    """Max deviation between chordal and great-circle interpolation."""
    h0 = np.asarray(h0, dtype=np.float64)
    h1 = np.asarray(h1, dtype=np.float64)
    grid = np.linspace(0.0, 1.0, 101) if lambda_grid is None else np.asarray(lambda_grid)
    cos_t = float(np.clip(h0 @ h1, -1.0, 1.0))
    theta = np.arccos(cos_t)
    if np.isclose(theta, np.pi):
        raise AntipodalPoints("geodesic is not unique for antipodal points")
    if theta == 0.0:
        return 0.0
    sin_t = np.sin(theta)
    geo = (
        np.sin((1.0 - grid)[:, None] * theta) * h0[None, :]
        + np.sin(grid[:, None] * theta) * h1[None, :]
    ) / sin_t
    lin = (1.0 - grid)[:, None] * h0[None, :] + grid[:, None] * h1[None, :]
    return float(np.max(np.linalg.norm(lin - geo, axis=1)))
