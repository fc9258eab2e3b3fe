import pytest
import torch
from transformers import GPT2Config, GPT2LMHeadModel


class ByteTokenizer:
    """Maps UTF-8 bytes to token ids; enough to drive a random model."""

    def __init__(self, vocab_size=120):
        self.vocab_size = vocab_size

    def __call__(self, text):
        return {"input_ids": [b % self.vocab_size for b in text.encode("utf-8")]}


def build_tiny_model(n_positions=64, n_embd=32, n_layer=2, seed=0):
    torch.manual_seed(seed)
    config = GPT2Config(
        vocab_size=120, n_positions=n_positions, n_embd=n_embd,
        n_layer=n_layer, n_head=2,
    )
    model = GPT2LMHeadModel(config)
    model.eval()
    return model


@pytest.fixture(scope="session")
def tiny_model():
    return build_tiny_model()


@pytest.fixture(scope="session")
def tokenizer():
    return ByteTokenizer()


@pytest.fixture
def corpus(tmp_path):
    text = (
        "The quick brown fox jumps over the lazy dog near the river bank.\n\n"
        "A small language model maps token sequences to next-token logits.\n\n"
        "Manifolds of hidden states can be probed with nearest neighbors.\n\n"
        "Entropy and margin statistics summarize the output distribution.\n\n"
        "Sampling positions without replacement keeps every layer aligned.\n"
    )
    path = tmp_path / "corpus.txt"
    path.write_text(text, encoding="utf-8")
    return path
