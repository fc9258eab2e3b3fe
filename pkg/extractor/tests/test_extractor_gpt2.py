"""End-to-end statistics on the real GPT-2 checkpoint.

Skipped automatically when the checkpoint cannot be loaded (offline
environment) or when no natural-language corpus is provided via the
LSM_GPT2_CORPUS environment variable (a plain-text file with
blank-line-separated passages).
"""

import os
import time

import numpy as np
import pytest

from lsm_extractor.errors import ModelLoadFailure
from lsm_extractor.extract import extract, load_model
from semgeom.intrinsic_dim import layer_profile
from semgeom.io import load_cloud, load_head
from semgeom.margins import (
    DEFAULT_FIT_RANGE,
    fit_loglog,
    gap_curve,
    margin_samples,
)


@pytest.fixture(scope="module")
def gpt2():
    try:
        return load_model("gpt2")
    except ModelLoadFailure as exc:
        pytest.skip(f"gpt2 checkpoint unavailable: {exc}")


@pytest.fixture(scope="module")
def corpus_path():
    path = os.environ.get("LSM_GPT2_CORPUS")
    if not path or not os.path.exists(path):
        pytest.skip("set LSM_GPT2_CORPUS to a plain-text corpus file")
    return path


def test_gpt2_margin_and_dimension_statistics(gpt2, corpus_path, tmp_path):
    model, tokenizer = gpt2
    t0 = time.monotonic()
    layers = list(range(13))
    out = tmp_path / "gpt2"
    manifest = extract(model, tokenizer, corpus_path, layers, 1800, 0, out)
    assert manifest["model"]["hidden_size"] == 768
    assert manifest["model"]["num_layers"] == 12

    head = load_head(out / "head.lsmh")
    final = load_cloud(out / "layer_12.lsm")
    margins = np.array([s.margin for s in margin_samples(head, final)])

    median = float(np.median(margins))
    frac_below_half = float(np.mean(margins < 0.5))
    curve = fit_loglog(gap_curve(margins), *DEFAULT_FIT_RANGE)
    assert abs(median - 0.487) <= 0.10
    assert abs(frac_below_half - 0.512) <= 0.08
    assert 0.9 <= curve.fit["slope"] <= 1.3
    assert curve.fit["r_squared"] > 0.97

    clouds = [load_cloud(out / f"layer_{l:02d}.lsm") for l in layers]
    prof = layer_profile(clouds, estimator="two_nn", k=20)
    assert abs(prof.peak_value - 19.2) <= 4.0

    assert time.monotonic() - t0 < 600.0
