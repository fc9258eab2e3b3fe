"""Fisher information geometry of the softmax head.

The metric at a hidden state h is G = W' (diag(p) - p p') W, the
pullback of the Fisher-Rao metric through the token distribution.
Also provides the restricted (tangent) metric, KL divergence, its
quadratic local expansion, and the Bhattacharyya geodesic lower bound.
"""

import numpy as np

from .errors import (
    DegenerateDirection,
    DimensionMismatch,
    NonFiniteEntry,
    RankDeficientBasis,
    SupportMismatch,
)
from .types import FisherMatrix, UnembeddingHead


def softmax(logits):
    """Max-subtracted softmax; invariant under adding a constant."""
    z = np.asarray(logits, dtype=np.float64)
    if not np.all(np.isfinite(z)):
        raise NonFiniteEntry("logits contain NaN or Inf")
    z = z - np.max(z)
    e = np.exp(z)
    return e / np.sum(e)


def token_distribution(head: UnembeddingHead, h):
    h = np.asarray(h, dtype=np.float64).ravel()
    if h.shape[0] != head.d:
        raise DimensionMismatch(f"h has dim {h.shape[0]}, head expects {head.d}")
    z = head.W @ h
    if head.b is not None:
        z = z + head.b
    return softmax(z)


def fisher_matrix(head: UnembeddingHead, h, top_k: int | None = None) -> FisherMatrix:
    """G = W' diag(p) W - (W'p)(W'p)', without materializing diag(p) - pp'.

    With top_k set, p is renormalized over the top_k most likely tokens
    and W restricted to the matching rows, so G stays the Fisher matrix
    of a (smaller) categorical distribution.
    """
    h = np.asarray(h, dtype=np.float64).ravel()
    p = token_distribution(head, h)
    W = head.W
    if top_k is not None:
        if not (2 <= top_k <= head.vocab_size):
            raise ValueError("top_k must satisfy 2 <= top_k <= N")
        keep = np.argsort(-p, kind="stable")[:top_k]
        p = p[keep]
        p = p / np.sum(p)
        W = W[keep]
    Wp = W.T @ p
    G = (W.T * p) @ W - np.outer(Wp, Wp)
    G = 0.5 * (G + G.T)
    return FisherMatrix(G, h)


def restricted_metric(G: FisherMatrix, tangent_basis):
    """J' G J for a d x k basis with linearly independent columns."""
    J = np.asarray(tangent_basis, dtype=np.float64)
    if J.ndim != 2 or J.shape[0] != G.d:
        raise DimensionMismatch("tangent basis must be d x k")
    if np.linalg.matrix_rank(J) < J.shape[1]:
        raise RankDeficientBasis("tangent basis columns are linearly dependent")
    M = J.T @ G.G @ J
    return 0.5 * (M + M.T)


def kl_divergence(p0, p1):
    """KL(p0 || p1) with the 0 log 0 = 0 convention."""
    p0 = np.asarray(p0, dtype=np.float64)
    p1 = np.asarray(p1, dtype=np.float64)
    if p0.shape != p1.shape:
        raise DimensionMismatch("distributions must have equal length")
    support = p0 > 0
    if np.any(p1[support] <= 0):
        raise SupportMismatch("p1 vanishes where p0 > 0")
    return float(np.sum(p0[support] * np.log(p0[support] / p1[support])))


def kl_quadratic_residual(head: UnembeddingHead, h, delta):
    """Compare KL(p(.|h) || p(.|h+delta)) against 1/2 delta' G(h) delta."""
    h = np.asarray(h, dtype=np.float64).ravel()
    delta = np.asarray(delta, dtype=np.float64).ravel()
    G = fisher_matrix(head, h)
    quad = 0.5 * float(delta @ G.G @ delta)
    if quad <= 0:
        raise DegenerateDirection("delta lies in the metric's null space")
    p0 = token_distribution(head, h)
    p1 = token_distribution(head, h + delta)
    kl = kl_divergence(p0, p1)
    return {"kl": kl, "quad": quad, "ratio": kl / quad}


def fisher_rao_lower_bound(p0, p1):
    """Bhattacharyya coefficient and 2*arccos(bc) geodesic lower bound."""
    p0 = np.asarray(p0, dtype=np.float64)
    p1 = np.asarray(p1, dtype=np.float64)
    if p0.shape != p1.shape:
        raise DimensionMismatch("distributions must have equal length")
    bc = float(np.clip(np.sum(np.sqrt(p0 * p1)), 0.0, 1.0))
    return {"bc": bc, "bound": 2.0 * float(np.arccos(bc))}
