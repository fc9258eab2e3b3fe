import pytest

import lsm_extractor.cli as cli


def test_bad_model_id_exits_2(tmp_path, capsys):
    corpus = tmp_path / "c.txt"
    corpus.write_text("some text long enough to tokenize\n", encoding="utf-8")
    rc = cli.main([
        "--model", str(tmp_path / "no-such-model"),
        "--corpus", str(corpus),
        "--layers", "0",
        "--max", "10",
        "--out", str(tmp_path / "out"),
    ])
    assert rc == 2
    assert "error" in capsys.readouterr().err


def test_happy_path_with_stub_loader(
    tiny_model, tokenizer, corpus, tmp_path, monkeypatch, capsys
):
    monkeypatch.setattr(cli, "load_model", lambda mid: (tiny_model, tokenizer))
    out = tmp_path / "out"
    rc = cli.main([
        "--model", "stub",
        "--corpus", str(corpus),
        "--layers", "0,1,2",
        "--max", "30",
        "--seed", "4",
        "--out", str(out),
    ])
    assert rc == 0
    assert "wrote 30 vectors" in capsys.readouterr().out
    for name in ("manifest.json", "layer_00.lsm", "layer_01.lsm",
                 "layer_02.lsm", "logits.lsm", "head.lsmh"):
        assert (out / name).exists()


def test_missing_corpus_exits_2(tiny_model, tokenizer, tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(cli, "load_model", lambda mid: (tiny_model, tokenizer))
    rc = cli.main([
        "--model", "stub",
        "--corpus", str(tmp_path / "missing.txt"),
        "--layers", "0",
        "--max", "10",
        "--out", str(tmp_path / "out"),
    ])
    assert rc == 2
    assert "error" in capsys.readouterr().err


def test_layer_list_parsing():
    assert cli.parse_layers("0,6,12") == [0, 6, 12]
    with pytest.raises(Exception):
        cli.parse_layers("0,six")
