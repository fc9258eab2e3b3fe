"""Geometry toolkit for language-model hidden-state manifolds."""

__version__ = "0.1.0"

from .types import (  # noqa: F401
    Codebook,
    DimensionEstimate,
    FisherMatrix,
    GapCurve,
    MarginSample,
    NeighborTable,
    PointCloud,
    UnembeddingHead,
    validate_cloud,
)
