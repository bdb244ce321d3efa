"""End-to-end command-line runs, in process."""

import json

import pytest

from storydec.cli import main


def run(argv, capsys):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    directory = tmp_path_factory.mktemp("corpus")
    from storydec.data import synth_toy_corpus
    info = synth_toy_corpus(directory, seed=0, n_stories=3)
    return directory, info


@pytest.fixture(scope="module")
def trained(corpus, tmp_path_factory):
    directory, info = corpus
    out = tmp_path_factory.mktemp("model")
    argv = [
        "train",
        "--features", info["features"], "--concepts", info["concepts"],
        "--stories", info["stories"], "--epochs", 3,
        "--params-out", out / "model.npz", "--curve-out", out / "curve.csv",
    ]
    code = main([str(a) for a in argv])
    assert code == 0
    return out / "model.npz", out / "curve.csv"


class TestSynth:
    def test_writes_corpus(self, tmp_path, capsys):
        code, out, _ = run(
            ["synth", "--out-dir", tmp_path / "c", "--stories", 2], capsys
        )
        assert code == 0
        assert "2 stories" in out
        assert (tmp_path / "c" / "features.jsonl").is_file()
        assert (tmp_path / "c" / "concepts.jsonl").is_file()
        assert (tmp_path / "c" / "stories.jsonl").is_file()


class TestTrain:
    def test_outputs_exist(self, trained):
        params_path, curve_path = trained
        assert params_path.is_file()
        lines = curve_path.read_text().splitlines()
        assert lines[0] == "epoch,loss"
        assert len(lines) == 4

    def test_missing_file_is_diagnosed(self, tmp_path, capsys):
        code, _, err = run(
            ["train", "--features", tmp_path / "absent.jsonl",
             "--concepts", tmp_path / "absent.jsonl",
             "--stories", tmp_path / "absent.jsonl",
             "--params-out", tmp_path / "m.npz"],
            capsys,
        )
        assert code == 1
        assert "storydec: error" in err

    def test_odd_album_size_is_diagnosed(self, corpus, tmp_path, capsys):
        _, info = corpus
        code, _, err = run(
            ["train", "--features", info["features"],
             "--concepts", info["concepts"], "--stories", info["stories"],
             "--album-size", 5, "--epochs", 1,
             "--params-out", tmp_path / "m.npz"],
            capsys,
        )
        assert code == 1
        assert "even" in err

    def test_usage_error_exits_two(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["train", "--features", "x"])
        assert info.value.code == 2
        capsys.readouterr()


class TestGenerate:
    def test_writes_stories(self, corpus, trained, tmp_path, capsys):
        _, info = corpus
        params_path, _ = trained
        out = tmp_path / "stories_out.jsonl"
        code, text, _ = run(
            ["generate", "--params", params_path,
             "--features", info["features"], "--concepts", info["concepts"],
             "--stories", info["stories"], "--beam-width", 2, "--out", out],
            capsys,
        )
        assert code == 0
        assert "3 stories" in text
        records = [json.loads(line) for line in out.read_text().splitlines()]
        assert [r["story_id"] for r in records] == ["toy00", "toy01", "toy02"]
        for record in records:
            assert len(record["sentences"]) == 5
            for sentence in record["sentences"]:
                assert all(isinstance(w, str) for w in sentence)

    def test_deterministic(self, corpus, trained, tmp_path, capsys):
        _, info = corpus
        params_path, _ = trained
        outs = []
        for name in ("a.jsonl", "b.jsonl"):
            out = tmp_path / name
            code, _, _ = run(
                ["generate", "--params", params_path,
                 "--features", info["features"],
                 "--concepts", info["concepts"],
                 "--stories", info["stories"], "--out", out],
                capsys,
            )
            assert code == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_vocabulary_mismatch_is_diagnosed(self, trained, tmp_path,
                                              capsys):
        from storydec.data import synth_toy_corpus
        params_path, _ = trained
        other = synth_toy_corpus(tmp_path / "small", seed=1, n_stories=3,
                                 n_words=9)
        code, _, err = run(
            ["generate", "--params", params_path,
             "--features", other["features"], "--concepts", other["concepts"],
             "--stories", other["stories"], "--out", tmp_path / "o.jsonl"],
            capsys,
        )
        assert code == 1
        assert "vocabulary" in err

    def test_zero_beam_width_is_diagnosed(self, corpus, trained, tmp_path,
                                          capsys):
        _, info = corpus
        params_path, _ = trained
        code, _, err = run(
            ["generate", "--params", params_path,
             "--features", info["features"], "--concepts", info["concepts"],
             "--stories", info["stories"], "--beam-width", 0,
             "--out", tmp_path / "o.jsonl"],
            capsys,
        )
        assert code == 1
        assert "--beam-width" in err


def test_no_command_exits_two(capsys):
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2
    capsys.readouterr()


def test_train_then_generate_round_trips_vocabulary(tmp_path, capsys):
    # The same stories file drives both commands, so generated words
    # always decode through the vocabulary the model was trained with.
    code, _, _ = run(
        ["synth", "--out-dir", tmp_path, "--stories", 2, "--seed", 7],
        capsys,
    )
    assert code == 0
    code, _, _ = run(
        ["train", "--features", tmp_path / "features.jsonl",
         "--concepts", tmp_path / "concepts.jsonl",
         "--stories", tmp_path / "stories.jsonl", "--epochs", 2,
         "--params-out", tmp_path / "m.npz"],
        capsys,
    )
    assert code == 0
    code, _, _ = run(
        ["generate", "--params", tmp_path / "m.npz",
         "--features", tmp_path / "features.jsonl",
         "--concepts", tmp_path / "concepts.jsonl",
         "--stories", tmp_path / "stories.jsonl",
         "--out", tmp_path / "out.jsonl"],
        capsys,
    )
    assert code == 0
    words = {
        w
        for line in (tmp_path / "out.jsonl").read_text().splitlines()
        for sentence in json.loads(line)["sentences"]
        for w in sentence
    }
    vocab_words = {f"w{n:02d}" for n in range(48)} | {"<s>", "</s>"}
    assert words <= vocab_words
