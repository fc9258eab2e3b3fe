"""Voronoi margins, entropy, the gap curve eta(eps), and fit statistics.

The margin at a hidden state is the gap between the largest and
second-largest logits; eta(eps) is the empirical CDF of margins with
strict inequality m < eps; the log-log fit tests the linear scaling
prediction (slope close to 1).
"""

import numpy as np
from scipy import stats

from .errors import (
    DimensionMismatch,
    EmptyInput,
    InsufficientPositivePoints,
    LengthMismatch,
    ZeroVariance,
)
from .types import GapCurve, MarginSample, PointCloud, UnembeddingHead

DEFAULT_EPS_GRID = np.logspace(-3.0, 1.0, 50)
DEFAULT_FIT_RANGE = (0.01, 0.3)


def logits(head: UnembeddingHead, h):
    """W h + b for one hidden state or a batch of rows."""
    h = np.asarray(h, dtype=np.float64)
    single = h.ndim == 1
    H = h[None, :] if single else h
    if H.shape[1] != head.d:
        raise DimensionMismatch(f"hidden dim {H.shape[1]} != head dim {head.d}")
    z = H @ head.W.T
    if head.b is not None:
        z = z + head.b
    return z[0] if single else z


def _entropy(z):
    z = z - np.max(z)
    e = np.exp(z)
    p = e / np.sum(e)
    mask = p > 0
    return float(-np.sum(p[mask] * np.log(p[mask])))


def margin_sample(logit_vector) -> MarginSample:
    """Top/runner-up by value, lowest index on ties; entropy in nats."""
    z = np.asarray(logit_vector, dtype=np.float64)
    if z.shape[0] < 2:
        raise DimensionMismatch("need at least 2 logits")
    # stable sort on -z: equal values keep the lower index first
    order = np.argsort(-z, kind="stable")
    top, runner = int(order[0]), int(order[1])
    return MarginSample(
        margin=float(z[top] - z[runner]),
        top_token=top,
        runner_up_token=runner,
        entropy=_entropy(z),
    )


def margin_samples(head: UnembeddingHead, cloud: PointCloud):
    """Margin, token pair, and entropy for every point of a cloud."""
    Z = logits(head, cloud.points)
    return [margin_sample(z) for z in Z]


def gap_curve(margins, epsilon_grid=None) -> GapCurve:
    """Empirical CDF of margins on the grid, strict inequality."""
    m = np.asarray(margins, dtype=np.float64)
    if m.size == 0:
        raise EmptyInput("no margins given")
    eps = DEFAULT_EPS_GRID if epsilon_grid is None else np.asarray(epsilon_grid, dtype=np.float64)
    sorted_m = np.sort(m)
    counts = np.searchsorted(sorted_m, eps, side="left")
    return GapCurve(eps, counts / m.size)


def fit_loglog(curve: GapCurve, eps_min=None, eps_max=None) -> GapCurve:
    """OLS of log10(eta) on log10(eps) over a positive sub-range."""
    if eps_min is None:
        eps_min = DEFAULT_FIT_RANGE[0]
    if eps_max is None:
        eps_max = DEFAULT_FIT_RANGE[1]
    mask = (curve.epsilons >= eps_min) & (curve.epsilons <= eps_max) & (curve.etas > 0)
    if np.count_nonzero(mask) < 3:
        raise InsufficientPositivePoints(
            "need >= 3 grid points with eta > 0 in the fit range"
        )
    x = np.log10(curve.epsilons[mask])
    y = np.log10(curve.etas[mask])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    fit = {
        "slope": float(slope),
        "intercept": float(intercept),
        "r_squared": float(np.clip(r2, 0.0, 1.0)),
        "eps_min": float(eps_min),
        "eps_max": float(eps_max),
    }
    return GapCurve(curve.epsilons, curve.etas, fit)


def spearman(x, y):
    """Spearman rank correlation with average ranks on ties."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise LengthMismatch("inputs must have equal length")
    if x.size < 2:
        raise LengthMismatch("need at least 2 observations")
    rx = stats.rankdata(x)
    ry = stats.rankdata(y)
    if np.all(rx == rx[0]) or np.all(ry == ry[0]):
        raise ZeroVariance("constant input has no rank correlation")
    return float(np.corrcoef(rx, ry)[0, 1])


def percentile_profile(margins):
    """Linear-interpolation percentiles at 5/25/50/75/95."""
    m = np.asarray(margins, dtype=np.float64)
    if m.size == 0:
        raise EmptyInput("no margins given")
    p = np.percentile(m, [5, 25, 50, 75, 95], method="linear")
    return {
        "p05": float(p[0]),
        "p25": float(p[1]),
        "p50": float(p[2]),
        "p75": float(p[3]),
        "p95": float(p[4]),
    }


def voronoi_assign(head: UnembeddingHead, cloud: PointCloud):
    """Argmax-of-logits token per point, lowest index on ties.

    With zero bias and equal-norm rows of W this coincides with
    nearest-row assignment.
    """
    Z = logits(head, cloud.points)
    # argmax is the first maximal index, which is the tie rule we want
    return np.argmax(Z, axis=1).astype(np.int64)
