"""Intrinsic dimension estimators and per-layer profiling.

Two estimators: the two-nearest-neighbor ratio estimator (Pareto MLE
on mu_i = rho_2/rho_1) and the Levina-Bickel k-NN MLE averaged over
neighborhood sizes k1..k2.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import AllRatiosUnity, DegenerateNeighborhood, KTooLarge
from .knn import build_neighbor_table
from .types import DimensionEstimate, NeighborTable

TWO_NN_DISCARD = 0.01
MLE_K1 = 10
MLE_K2 = 20


def two_nn(table: NeighborTable, discard_fraction: float = TWO_NN_DISCARD) -> DimensionEstimate:
    """Pareto-MLE dimension from second-to-first neighbor distance ratios.

    The largest ceil(discard_fraction * n) ratios are dropped before the
    maximum-likelihood step, the usual guard against the Pareto tail.
    """
    if table.k < 2:
        raise KTooLarge("two_nn needs at least 2 neighbors per point")
    if not (0.0 <= discard_fraction < 1.0):
        raise ValueError("discard_fraction must lie in [0, 1)")
    r1 = table.distances[:, 0]
    r2 = table.distances[:, 1]
    if np.any(r1 <= 0):
        raise DegenerateNeighborhood("duplicate points: some rho_1 = 0")
    mu = r2 / r1
    n = mu.shape[0]
    n_discard = int(np.ceil(discard_fraction * n))
    if n_discard > 0:
        mu = np.sort(mu)[: n - n_discard]
    n_used = mu.shape[0]
    log_sum = float(np.sum(np.log(mu)))
    if log_sum == 0.0:
        raise AllRatiosUnity("all distance ratios equal 1")
    return DimensionEstimate(
        value=n_used / log_sum,
        estimator="two_nn",
        n_used=n_used,
        params={"discard_fraction": discard_fraction},
    )


def mle_dimension(
    table: NeighborTable,
    k1: int = MLE_K1,
    k2: int = MLE_K2,
    bias_corrected: bool = False,
) -> DimensionEstimate:
    """Levina-Bickel MLE averaged over points, then over j in [k1, k2].

    Uses the (j-1) normalization as published; bias_corrected switches to
    the (j-2) variant.
    """
    if not (2 <= k1 <= k2 <= table.k):
        raise KTooLarge(f"need 2 <= k1 <= k2 <= {table.k}, got k1={k1}, k2={k2}")
    T = table.distances  # n x k, sorted ascending
    if np.any(T[:, 0] <= 0):
        raise DegenerateNeighborhood("duplicate points: zero neighbor distance")
    logT = np.log(T)
    cum = np.cumsum(logT, axis=1)  # cum[:, j-1] = sum_{l<=j} log T_l
    per_j = []
    for j in range(k1, k2 + 1):
        # mean_{l<j} log(T_j / T_l) = log T_j - (1/(j-1)) sum_{l<j} log T_l
        denom = (j - 2) if bias_corrected else (j - 1)
        s = logT[:, j - 1] - cum[:, j - 2] / (j - 1)
        s = s * (j - 1) / denom
        if np.any(s <= 0):
            raise DegenerateNeighborhood("nonpositive log distance ratio")
        per_j.append(np.mean(1.0 / s))
    value = float(np.mean(per_j))
    return DimensionEstimate(
        value=value,
        estimator="mle",
        n_used=table.n,
        params={"k1": k1, "k2": k2, "bias_corrected": bias_corrected},
    )


@dataclass(frozen=True)
class LayerProfile:
    """Per-layer dimension estimates with hourglass summary statistics.

    Layer 0 is estimated but excluded from the peak statistics; layers
    whose estimator failed are recorded as None.
    """

    estimates: list          # per-layer DimensionEstimate or None
    layer_indices: list
    ambient_d: int
    peak_layer: int
    peak_value: float
    final_value: float
    errors: dict = field(default_factory=dict)

    @property
    def utilization(self):
        return self.peak_value / self.ambient_d


def layer_profile(
    clouds,
    estimator: str = "two_nn",
    k: int = 20,
    workers: int = 1,
    **settings,
) -> LayerProfile:
    """Estimate intrinsic dimension per layer and locate the mid-depth peak."""
    clouds = list(clouds)
    if len(clouds) < 2:
        raise ValueError("need at least 2 layers")
    d = clouds[0].d
    if any(c.d != d for c in clouds):
        raise ValueError("all layers must share the ambient dimension")
    estimates, errors = [], {}
    for c in clouds:
        try:
            table = build_neighbor_table(c, min(k, c.n - 1), workers=workers)
            if estimator == "two_nn":
                est = two_nn(table, **settings)
            elif estimator == "mle":
                est = mle_dimension(table, **settings)
            else:
                raise ValueError(f"unknown estimator {estimator!r}")
            estimates.append(est)
        except (DegenerateNeighborhood, AllRatiosUnity, KTooLarge) as e:
            estimates.append(None)
            errors[c.layer_index] = str(e)
    layer_indices = [c.layer_index for c in clouds]
    # peak excludes layer 0
    candidates = [
        (est.value, li)
        for est, li in zip(estimates, layer_indices)
        if est is not None and li != 0
    ]
    if not candidates:
        raise DegenerateNeighborhood("no usable layer estimates beyond layer 0")
    peak_value, peak_layer = max(candidates)
    final = next(
        (est.value for est in reversed(estimates) if est is not None), peak_value
    )
    return LayerProfile(
        estimates=estimates,
        layer_indices=layer_indices,
        ambient_d=d,
        peak_layer=peak_layer,
        peak_value=peak_value,
        final_value=final,
        errors=errors,
    )
