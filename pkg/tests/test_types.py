import numpy as np
import pytest

from semgeom import errors
from semgeom.types import (
    FisherMatrix,
    GapCurve,
    MarginSample,
    NeighborTable,
    PointCloud,
    UnembeddingHead,
    validate_cloud,
)


def test_degenerate_but_valid_cloud():
    c = validate_cloud(PointCloud(np.zeros((2, 3))))
    assert c.n == 2 and c.d == 3


def test_nan_rejected():
    pts = np.zeros((3, 2))
    pts[1, 1] = np.nan
    with pytest.raises(errors.NonFiniteEntry):
        PointCloud(pts)


def test_single_point_rejected():
    with pytest.raises(errors.TooFewPoints):
        PointCloud(np.zeros((1, 5)))


def test_cloud_is_immutable():
    c = PointCloud(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        c.points[0, 0] = 1.0


def test_head_bias_length_checked():
    with pytest.raises(ValueError):
        UnembeddingHead(np.eye(3), b=np.zeros(2))


def test_neighbor_table_rejects_self_loop():
    idx = np.array([[0], [0]])
    dst = np.array([[0.0], [1.0]])
    with pytest.raises(ValueError):
        NeighborTable(idx, dst)


def test_neighbor_table_rejects_unsorted():
    idx = np.array([[1, 2], [0, 2], [0, 1]])
    dst = np.array([[2.0, 1.0], [1.0, 2.0], [1.0, 2.0]])
    with pytest.raises(ValueError):
        NeighborTable(idx, dst)


def test_margin_sample_invariants():
    with pytest.raises(ValueError):
        MarginSample(margin=0.1, top_token=3, runner_up_token=3, entropy=0.5)
    with pytest.raises(ValueError):
        MarginSample(margin=-0.1, top_token=0, runner_up_token=1, entropy=0.5)


def test_gap_curve_monotonicity_enforced():
    with pytest.raises(ValueError):
        GapCurve(np.array([0.1, 0.2]), np.array([0.5, 0.4]))


def test_fisher_matrix_requires_symmetry_and_psd():
    with pytest.raises(ValueError):
        FisherMatrix(np.array([[1.0, 2.0], [0.0, 1.0]]), np.zeros(2))
    with pytest.raises(ValueError):
        FisherMatrix(-np.eye(2), np.zeros(2))


def test_fisher_shift_invariance_direction():
    # W v proportional to ones -> v' G v = 0
    rng = np.random.default_rng(0)
    W = rng.standard_normal((4, 3))
    v = np.linalg.lstsq(W, np.ones(4), rcond=None)[0]
    if np.allclose(W @ v, np.ones(4)):
        from semgeom.fisher import fisher_matrix
        G = fisher_matrix(UnembeddingHead(W), rng.standard_normal(3))
        assert abs(v @ G.G @ v) < 1e-10


def test_codebook_assignment_range_checked():
    with pytest.raises(ValueError):
        from semgeom.types import Codebook
        Codebook(np.zeros((2, 2)), np.array([0, 2]), 0.0)
