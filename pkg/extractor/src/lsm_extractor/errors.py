class ExtractorError(Exception):
    """Base class for extraction failures."""


class ModelLoadFailure(ExtractorError):
    """The pretrained model or its tokenizer could not be loaded."""


class EmptyCorpus(ExtractorError):
    """No token positions are available to sample (empty corpus,
    passages too short, or max_vectors not positive)."""


class BadLayerList(ExtractorError):
    """A requested layer index is outside [0, num_layers]."""
