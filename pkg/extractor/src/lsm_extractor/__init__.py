"""Hidden-state extractor for causal language models."""

from .errors import BadLayerList, EmptyCorpus, ExtractorError, ModelLoadFailure
from .extract import extract, load_model, read_passages, sample_positions
from .formats import write_cloud_file, write_head_file

__version__ = "0.1.0"

__all__ = [
    "BadLayerList",
    "EmptyCorpus",
    "ExtractorError",
    "ModelLoadFailure",
    "extract",
    "load_model",
    "read_passages",
    "sample_positions",
    "write_cloud_file",
    "write_head_file",
    "__version__",
]
