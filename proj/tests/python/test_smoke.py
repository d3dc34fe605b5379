import math
import pathlib

import pytest

import kilm

FIXTURES = pathlib.Path(__file__).resolve().parents[1] / "fixtures"


def test_tokenize():
    assert kilm.tokenize("the Joker. It ran") == ["the", "Joker", ".", "It", "ran"]


def test_joker_infill():
    text = "the supervillain the Joker. It ran"
    out = kilm.kn_infill(text, 3, 4, "Joker (character)", "Fictional character throughout the DC Universe")
    assert "<ent> Joker </ent><ent_desc> Joker (character) <sep> Fictional character" in out["y_text"]
    assert "<ent_desc> <mask> </ent_desc>" in out["x_text"]
    assert out["beta"] == [out["y_labels"].count("K"), len(out["y_tokens"])]
    assert out["alpha"][0] == 0


def test_masking_budget():
    text = " ".join(f"w{i}" for i in range(100))
    out = kilm.kn_infill(text, 10, 12, "T", "a thing", seed=4, mask_prob=0.3)
    assert sum(s["end"] - s["start"] for s in out["infill_spans"]) == 30
    assert kilm.mask_budget(0.3, 100) == 30


def test_ngram_and_rank():
    model = kilm.NGramModel([["a", "b", "a", "b"]], order=2, delta=1.0)
    assert model.prob(["a"], "b") == pytest.approx(3 / 5)
    assert model.score("a", "b") == pytest.approx([math.log(3 / 5)])
    prompts = kilm.build_ed_prompts(
        {
            "id": "m1",
            "context": "a Joker b",
            "mention": {"text": "Joker"},
            "candidates": [
                {"title": "Joker (character)", "description": "villain"},
                {"title": "Joker (film)", "description": "a film"},
            ],
            "gold_title": "Joker (character)",
        }
    )
    assert len(prompts) == 2
    records, report = kilm.rank(prompts, model, "sum")
    assert report["scored"] == 1
    assert records[0]["predicted_index"] in (0, 1)


def test_metrics():
    assert kilm.unigram_f1("american actor", "actor") == pytest.approx(2 / 3)
    records = [
        {"instance_id": str(i), "predicted_title": p, "gold_title": g, "in_kb": True, "scored": True}
        for i, (p, g) in enumerate([("A", "A"), ("B", "B"), ("C", "C"), ("X", "D")])
    ]
    assert kilm.evaluate(records, "inkb_f1")["ed"]["aggregate"]["inkb_f1"] == 0.75


def test_tfidf():
    index = kilm.TfidfIndex(["who wrote the novel", "which river is longest", "who founded the city"])
    assert index.query("who wrote it", 1)[0][0] == 0


def test_transcript():
    report = kilm.validate_transcript(
        FIXTURES / "protocol/golden_requests.jsonl", FIXTURES / "protocol/golden_responses.jsonl"
    )
    assert report["ok"]


def test_ingest_and_cli(tmp_path):
    report = kilm.ingest(FIXTURES / "joker/dump.xml", tmp_path / "corpus")
    assert report["articles"] == 3
    code = kilm.run_cli(["compile", str(tmp_path / "corpus"), "-o", str(tmp_path / "train"), "--mask-prob", "0"])
    assert code == 0
    assert (tmp_path / "train/train.jsonl").read_text() == (FIXTURES / "joker/golden_train.jsonl").read_text()


def test_errors_raise():
    with pytest.raises(kilm.KilmError):
        kilm.kn_infill("a b", 1, 5, "T", "d")
