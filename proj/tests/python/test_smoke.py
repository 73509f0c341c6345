import os
import pathlib

import pytest

import dialtree

FIXTURES = pathlib.Path(
    os.environ.get("DIALTREE_FIXTURE_DIR", pathlib.Path(__file__).resolve().parents[1] / "fixtures"))


def booking():
    return (FIXTURES / "booking.mr").read_text(encoding="utf-8")


def test_parse_reference_tree():
    t = dialtree.parse(booking())
    assert (t["concepts"], t["literals"], t["depth"], t["width"]) == (8, 10, 4, 4)
    assert len(dialtree.triples(booking())) == 26
    assert dialtree.canonical(t["canonical"]) == t["canonical"]


def test_errors_are_translated():
    with pytest.raises(dialtree.Error):
        dialtree.parse("(h1 / hotel")


def test_validate_and_smatch():
    assert dialtree.validate(booking()) == []
    kinds = [k for k, _, _ in dialtree.validate('(h1 / hotel :couleur "rouge")')]
    assert kinds == ["unknown-relation"]
    s = dialtree.smatch('(a1 / adresse :ville "Paris")', '(a1 / adresse :ville "Lyon")')
    assert round(s["f1"], 2) == 66.67
    assert dialtree.smatch("(h1 / hotel)", "(c1 / chambre)", exact=True)["f1"] == 50.0


def test_constrained_decode_is_valid():
    turns = ["bonjour", "une chambre double à Paris"]
    prompt = dialtree.render_prompt([(turns[0], turns[1])])
    out = dialtree.decode("random:5", turns, prompt, sample=True, seed=5)
    assert dialtree.validate(out) == []


def test_lora_and_quality():
    y = dialtree.lora_forward([[1, 0], [0, 1]], [[1, 0]], [[1], [0]], 2, [1, 1])
    assert y == pytest.approx([3.0, 1.0], abs=1e-12)
    assert dialtree.lora_grad_check(4, 4, 2, 4, seed=1) < 1e-4
    f = dialtree.featurize("une chambre", "(c1 / chambre)", "hash:8")
    assert len(f) == 16
    model = dialtree.train_svr([f, [0.0] * 16], [80.0, 20.0], max_iters=200)
    assert 0.0 <= dialtree.predict_score(model, f) <= 100.0
    kept, dropped = dialtree.filter_by_threshold({"a": 30, "b": 60, "c": 90}, 50)
    assert kept == ["b", "c"] and dropped == ["a"]
    assert dialtree.calibrate_delta([50, 10, 40, 20, 30], 20) == 10


def test_stats_and_iteration(tmp_path):
    s = dialtree.corpus_stats(str(FIXTURES / "stats.tsv"))
    assert (s["avg_user_turns"], s["pct_width_gt2"], s["pct_depth_gt2"]) == (2.0, 50.0, 50.0)
    cfg = str(FIXTURES / "pipeline" / "iteration.cfg")
    a = dialtree.run_iteration(cfg, str(tmp_path / "one"))
    b = dialtree.run_iteration(cfg, str(tmp_path / "two"))
    assert a["manifest"] == b["manifest"]
    assert (tmp_path / "one" / "training.jsonl").read_text() == a["training_jsonl"]
