import os
import pathlib

import pytest

import ptrparse

DATA = pathlib.Path(os.environ.get("PTRPARSE_DATA_DIR", pathlib.Path(__file__).parents[2] / "data"))
TENNIS = "(S (NP (PRP She)) (VP (VBZ enjoys) (S (VP (VBG playing) (NP (NN tennis))))) (. .))"


def test_tree_round_trip():
    tree = ptrparse.Tree.from_string(TENNIS)
    assert str(tree) == TENNIS
    assert len(tree) == 5
    assert tree.tagged_words()[1] == ("enjoys", "VBZ")
    assert tree.binarize().debinarize() == tree


def test_pointing_of_running_example():
    binary = ptrparse.Tree.from_string(TENNIS).binarize()
    entries = binary.pointing()
    assert [target for _, target, _ in entries] == [5, 5, 4, 2, 1]
    words = ptrparse.Tree.from_string(TENNIS).tagged_words()
    rebuilt = ptrparse.BinaryTree.from_pointing(entries, words)
    assert rebuilt.spans() == binary.spans()
    assert ptrparse.validate_pointing(entries)["valid"]


def test_crossing_pointing_is_rejected():
    report = ptrparse.validate_pointing([(1, 4, "A"), (2, 3, "B"), (3, 4, "C"), (4, 1, "A")])
    assert not report["valid"]
    assert report["issue"] == "overlap"
    assert report["token"] == 3


def test_malformed_bracketing_raises():
    with pytest.raises(ptrparse.ParseError):
        ptrparse.parse_bracketed("(S (NP a)")
    with pytest.raises(ValueError):
        ptrparse.parse_bracketed("(S (NP a)")


def test_evaluate_self_and_hand_example():
    trees = ptrparse.read_treebank(DATA / "dev.mrg")
    assert ptrparse.evaluate(trees, trees)["f1"] == 1.0
    gold = [ptrparse.Tree.from_string("(S (NN a) (VP (NN b) (NN c) (NN d)) (NN e))")]
    pred = [ptrparse.Tree.from_string("(S (NN a) (NN b) (NP (NN c) (NN d)) (NN e))")]
    assert ptrparse.evaluate(gold, pred)["f1"] == 0.5


def test_verify_level_six():
    results = ptrparse.verify(6)
    assert results and all(passed for _, passed, _ in results)


def test_train_parse_and_checkpoint(tmp_path):
    trees = ptrparse.read_treebank(DATA / "overfit50.mrg")[:8]
    config = ptrparse.ModelConfig()
    config.dim, config.ffn_hidden, config.pointing_hidden, config.label_hidden = 16, 32, 16, 16
    config.char_dim = config.char_hidden = 8
    hyper = ptrparse.Hyperparams()
    hyper.epochs, hyper.batch_size, hyper.seed, hyper.warmup_steps = 3, 2, 5, 4
    result = ptrparse.train(trees, trees, config, hyper)
    assert len(result.log) == 3
    assert 1 <= result.best_epoch <= 3

    line = "She_PRP enjoys_VBZ playing_VBG tennis_NN ._."
    tree = ptrparse.parse_tagged(result.model, line)
    assert tree.tagged_words() == [tuple(t.rsplit("_", 1)) for t in line.split()]

    path = tmp_path / "model.bin"
    result.model.save(path)
    loaded = ptrparse.Model.load(path)
    assert loaded.to_bytes() == result.model.to_bytes()
    assert str(ptrparse.parse_tagged(loaded, line)) == str(tree)


def test_bad_input_raises():
    model = ptrparse.Model.from_bytes(
        ptrparse.train(ptrparse.read_treebank(DATA / "overfit50.mrg")[:2], [],
                       hyper=_one_epoch()).model.to_bytes())
    with pytest.raises(ptrparse.DataError):
        model.parse([("a", "NO_SUCH_TAG")])
    with pytest.raises(ptrparse.DataError):
        ptrparse.parse_tagged(model, "nodelimiter")
    with pytest.raises(ptrparse.DataError):
        ptrparse.Model.from_bytes(b"not a checkpoint")


def _one_epoch():
    hyper = ptrparse.Hyperparams()
    hyper.epochs, hyper.seed = 1, 1
    return hyper
