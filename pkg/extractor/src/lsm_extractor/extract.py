"""Hidden-state extraction from pretrained causal language models.

Runs a model over a plain-text corpus, samples token positions, and
writes the states at those positions (one LSM1 file per layer), the
logits at the same positions (one LSM1 file), and the unembedding
head (one LSMH file), plus a JSON manifest.

Conventions:
- Layer 0 is the post-embedding, post-position-addition state, i.e.
  the input to the first transformer block. Layer L (the last entry)
  is captured after the model's final normalization, so that W.h
  reproduces the model's logits.
- Positions are sampled uniformly without replacement over all token
  positions with index >= 2 within their passage, pooled across
  passages. The same positions are used for every requested layer.
- The corpus is split into passages on blank lines; a passage is
  truncated to the model's position limit before inference.
"""

import json
import os
import tempfile

import numpy as np
import torch

from .errors import BadLayerList, EmptyCorpus, ModelLoadFailure
from .formats import write_cloud_file, write_head_file

MIN_POSITION = 2


def load_model(model_id):
    """Load a causal LM and its tokenizer by hub id or local path."""
    from transformers import AutoModelForCausalLM, AutoTokenizer

    try:
        tokenizer = AutoTokenizer.from_pretrained(model_id)
        model = AutoModelForCausalLM.from_pretrained(model_id)
    except Exception as exc:
        raise ModelLoadFailure(f"cannot load model {model_id!r}: {exc}") from exc
    return model, tokenizer


def read_passages(corpus_path):
    """Split a UTF-8 text file into passages on blank lines."""
    with open(corpus_path, encoding="utf-8") as f:
        text = f.read()
    passages = [p.strip() for p in text.split("\n\n")]
    return [p for p in passages if p]


def _position_limit(model):
    cfg = model.config
    for attr in ("max_position_embeddings", "n_positions"):
        limit = getattr(cfg, attr, None)
        if limit is not None:
            return int(limit)
    return 1024


def _head_arrays(model):
    head = model.get_output_embeddings()
    W = head.weight.detach().cpu().numpy()
    b = getattr(head, "bias", None)
    if b is not None:
        b = b.detach().cpu().numpy()
    return W, b


def sample_positions(token_counts, max_vectors, seed):
    """Pick (passage, position) pairs uniformly without replacement.

    Eligible positions are those with index >= MIN_POSITION within
    their passage. The result is sorted by (passage, position) so the
    file layout does not depend on the draw order.
    """
    pool = [
        (pi, ti)
        for pi, count in enumerate(token_counts)
        for ti in range(MIN_POSITION, count)
    ]
    if not pool:
        raise EmptyCorpus(
            f"no token positions with index >= {MIN_POSITION} in the corpus"
        )
    rng = np.random.default_rng(seed)
    take = min(max_vectors, len(pool))
    chosen = rng.choice(len(pool), size=take, replace=False)
    return sorted(pool[i] for i in chosen)


def _atomic_write_text(path, text):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def extract(model, tokenizer, corpus_path, layers, max_vectors, seed, out_dir):
    """Run the model over the corpus and dump states, logits, and head.

    Returns the manifest dict. Files written under out_dir:
    layer_<index>.lsm per requested layer, logits.lsm, head.lsmh,
    manifest.json.
    """
    if max_vectors <= 0:
        raise EmptyCorpus(f"max_vectors must be positive, got {max_vectors}")
    n_layers = int(model.config.num_hidden_layers)
    layers = sorted(set(int(l) for l in layers))
    for l in layers:
        if not 0 <= l <= n_layers:
            raise BadLayerList(f"layer {l} outside [0, {n_layers}]")
    if not layers:
        raise BadLayerList("no layers requested")

    passages = read_passages(corpus_path)
    if not passages:
        raise EmptyCorpus(f"no passages in {corpus_path}")

    limit = _position_limit(model)
    token_ids = []
    for p in passages:
        ids = tokenizer(p)["input_ids"]
        token_ids.append(list(ids)[:limit])
    positions = sample_positions([len(ids) for ids in token_ids], max_vectors, seed)

    by_passage = {}
    for pi, ti in positions:
        by_passage.setdefault(pi, []).append(ti)

    states = {l: [] for l in layers}
    logit_rows = []
    model.eval()
    with torch.no_grad():
        for pi in sorted(by_passage):
            ids = torch.tensor([token_ids[pi]], dtype=torch.long)
            out = model(input_ids=ids, output_hidden_states=True)
            keep = by_passage[pi]
            for l in layers:
                states[l].append(out.hidden_states[l][0, keep].cpu().numpy())
            logit_rows.append(out.logits[0, keep].cpu().numpy())

    os.makedirs(out_dir, exist_ok=True)
    files = {}
    for l in layers:
        name = f"layer_{l:02d}.lsm"
        write_cloud_file(os.path.join(out_dir, name), np.vstack(states[l]))
        files[f"layer_{l}"] = name
    write_cloud_file(os.path.join(out_dir, "logits.lsm"), np.vstack(logit_rows))
    files["logits"] = "logits.lsm"
    W, b = _head_arrays(model)
    write_head_file(os.path.join(out_dir, "head.lsmh"), W, b)
    files["head"] = "head.lsmh"

    manifest = {
        "schema": 1,
        "model": {
            "hidden_size": int(model.config.hidden_size),
            "num_layers": n_layers,
            "vocab_size": int(W.shape[0]),
        },
        "corpus": os.path.basename(corpus_path),
        "layers": layers,
        "max_vectors": max_vectors,
        "n_sampled": len(positions),
        "positions": [[pi, ti] for pi, ti in positions],
        "seed": seed,
        "files": files,
    }
    _atomic_write_text(
        os.path.join(out_dir, "manifest.json"),
        json.dumps(manifest, indent=2, sort_keys=True) + "\n",
    )
    return manifest
