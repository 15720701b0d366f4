from __future__ import annotations

import random

import pytest

from entail_ie.evaluate import (
    CorpusFormatError,
    DocumentMismatchError,
    GoldCorpus,
    GoldDocument,
    corpus_keys,
    decode_bio,
    load_conll,
    load_corpus_json,
    load_scored_items,
    score_keys,
    score_task,
    threshold_grid,
    tune_threshold,
)
from util import brute_force_bio

LABELS = ["PER", "LOC", "ORG"]


def random_tags(rng: random.Random, n: int) -> list[str]:
    tags = []
    for _ in range(n):
        roll = rng.random()
        if roll < 0.4:
            tags.append("O")
        elif roll < 0.7:
            tags.append(f"B-{rng.choice(LABELS)}")
        else:
            tags.append(f"I-{rng.choice(LABELS)}")
    return tags


# --- BIO decoding -------------------------------------------------------------


def test_bio_basic_span():
    assert decode_bio(["B-PER", "I-PER", "O"]) == [(0, 2, "PER")]


def test_bio_bare_i_opens_span():
    assert decode_bio(["I-PER", "I-PER", "I-LOC"]) == [(0, 2, "PER"), (2, 3, "LOC")]


def test_bio_b_after_b_splits():
    assert decode_bio(["B-PER", "B-PER"]) == [(0, 1, "PER"), (1, 2, "PER")]


def test_bio_rejects_garbage():
    with pytest.raises(CorpusFormatError):
        decode_bio(["B-PER", "X-LOC"])


def test_random_bio_matches_brute_force():
    rng = random.Random(17)
    for _ in range(500):
        tags = random_tags(rng, rng.randint(0, 20))
        assert decode_bio(tags) == brute_force_bio(tags)


# --- CoNLL loading --------------------------------------------------------------


CONLL_MISC = """-DOCSTART- -X- -X- O

The DT B-NP O
Olympics NNP I-NP B-MISC
ended VBD B-VP O
"""

CONLL_PER = """John NNP B-NP B-PER
Smith NNP I-NP I-PER
slept VBD B-VP O
"""


def test_conll_misc_relabelled_to_outside():
    corpus = load_conll(CONLL_MISC)
    assert len(corpus.documents) == 1
    assert corpus.documents[0].entities == ()


def test_conll_bio_decoding_produces_char_spans():
    corpus = load_conll(CONLL_PER)
    [doc] = corpus.documents
    assert doc.sentences == ("John Smith slept",)
    [(sent, start, end, label)] = doc.entities
    assert (sent, label) == (0, "PER")
    assert doc.sentences[0][start:end] == "John Smith"


def test_conll_malformed_line_has_line_number():
    with pytest.raises(CorpusFormatError) as err:
        load_conll("John NNP B-NP\n")
    assert "line 1" in str(err.value)


def test_conll_misc_equivalent_to_preset_o(samples_dir):
    with_misc = (samples_dir / "gold_ner.conll").read_text(encoding="utf-8")
    preset = with_misc.replace("B-MISC", "O").replace("I-MISC", "O")
    assert load_conll(with_misc) == load_conll(preset)


# --- corpus JSON / scoring -------------------------------------------------------


def test_sample_corpus_loads(samples_dir):
    corpus = load_corpus_json((samples_dir / "gold_corpus.json").read_bytes())
    assert corpus.doc_ids() == ("a", "b", "c")


def test_perfect_predictions_score_one(samples_dir):
    gold = load_corpus_json((samples_dir / "gold_corpus.json").read_bytes())
    for task in ("NER", "RE", "EE", "EAE"):
        report = score_task(gold, gold, task)
        if report.tp:  # tasks with no gold at all stay at zero
            assert report.precision == report.recall == report.f1 == 1.0


def test_zero_predictions_defined_as_zero():
    gold = GoldCorpus(
        documents=(
            GoldDocument(doc_id="d", sentences=("x",), entities=((0, 0, 1, "PER"),)),
        )
    )
    empty = GoldCorpus(documents=(GoldDocument(doc_id="d", sentences=("x",)),))
    report = score_task(empty, gold, "NER")
    assert (report.precision, report.recall, report.f1) == (0.0, 0.0, 0.0)


def test_document_mismatch_rejected():
    a = GoldCorpus(documents=(GoldDocument(doc_id="a", sentences=()),))
    b = GoldCorpus(documents=(GoldDocument(doc_id="b", sentences=()),))
    with pytest.raises(DocumentMismatchError):
        score_task(a, b, "NER")


# Hand-computed before implementation from samples/{gold,pred}_corpus.json:
#   NER: gold 8; preds 8 (Paris typed GPE not LOC, spurious "works", Carol
#        missed) -> tp=6 fp=2 fn=2 -> P=R=F1=0.75
#   RE:  gold 1; preds 2 (extra Bob->Carol) -> tp=1 fp=1 fn=0 -> P=.5 R=1 F1=2/3
#   EE:  gold 1; preds 2 (extra in doc a)   -> same as RE
#   EAE: gold 2; preds 2 (Place predicted as Time) -> tp=1 fp=1 fn=1 -> all .5
HAND_SCORES = {
    "NER": (0.75, 0.75, 0.75),
    "RE": (0.5, 1.0, 2 / 3),
    "EE": (0.5, 1.0, 2 / 3),
    "EAE": (0.5, 0.5, 0.5),
}


@pytest.mark.parametrize("task", sorted(HAND_SCORES))
def test_three_doc_fixture_hand_scores(samples_dir, task):
    gold = load_corpus_json((samples_dir / "gold_corpus.json").read_bytes())
    pred = load_corpus_json((samples_dir / "pred_corpus.json").read_bytes())
    report = score_task(pred, gold, task)
    p, r, f1 = HAND_SCORES[task]
    assert report.precision == pytest.approx(p)
    assert report.recall == pytest.approx(r)
    assert report.f1 == pytest.approx(f1)


def test_f1_identity_and_report_serialization(samples_dir):
    gold = load_corpus_json((samples_dir / "gold_corpus.json").read_bytes())
    pred = load_corpus_json((samples_dir / "pred_corpus.json").read_bytes())
    report = score_task(pred, gold, "NER")
    if report.precision + report.recall > 0:
        expected = 2 * report.precision * report.recall / (report.precision + report.recall)
    else:
        expected = 0.0
    assert report.f1 == pytest.approx(expected)
    data = report.to_dict()
    assert set(data) >= {"task", "precision", "recall", "f1", "per_type"}
    table = report.to_text()
    assert "micro" in table and "PER" in table


def test_scoring_symmetry_on_random_corpora():
    rng = random.Random(23)
    for _ in range(30):
        documents = []
        for d in range(rng.randint(1, 3)):
            entities = tuple(
                (0, i * 5, i * 5 + 3, rng.choice(LABELS)) for i in range(rng.randint(0, 5))
            )
            documents.append(
                GoldDocument(doc_id=f"d{d}", sentences=("x" * 60,), entities=entities)
            )
        corpus = GoldCorpus(documents=tuple(documents))
        report = score_task(corpus, corpus, "NER")
        if corpus_keys(corpus, "NER"):
            assert report.f1 == 1.0
        assert report.fp == report.fn == 0


# --- threshold tuning -----------------------------------------------------------


def test_grid_covers_unit_interval():
    grid = threshold_grid(0.01)
    assert grid[0] == 0.0 and grid[-1] == 1.0 and len(grid) == 101
    assert 0.5 in grid


def test_tune_true_positives_high_false_positives_low():
    gold = {("d", 0, i, i + 1, "PER") for i in range(5)}
    predictions = [((("d", 0, i, i + 1, "PER")), 0.9) for i in range(5)]
    predictions += [((("d", 0, 50 + i, 51 + i, "PER")), 0.1) for i in range(3)]
    best, report = tune_threshold(predictions, gold, "NER")
    assert best == pytest.approx(0.90)
    assert report.f1 == 1.0


def test_tune_single_correct_extraction():
    gold = {("d", 0, 0, 3, "PER")}
    best, report = tune_threshold([(("d", 0, 0, 3, "PER"), 0.6)], gold, "NER")
    assert best == pytest.approx(0.60)
    assert report.f1 == 1.0


def test_tune_empty_dev_set_errors():
    with pytest.raises(ValueError):
        tune_threshold([], {("d", 0, 0, 1, "PER")}, "NER")


def random_dev_set(rng: random.Random, quantized: bool):
    gold = set()
    predictions = []
    for i in range(rng.randint(1, 25)):
        key = ("d", 0, i, i + 1, rng.choice(LABELS))
        if rng.random() < 0.6:
            gold.add(key)
        score = rng.random()
        if quantized:
            score = round(round(score / 0.01) * 0.01, 10)
        predictions.append((key, score))
    for i in range(rng.randint(0, 5)):
        gold.add(("d", 1, i, i + 1, rng.choice(LABELS)))  # unreachable gold
    return predictions, gold


def test_tuned_threshold_beats_default_and_every_grid_point():
    rng = random.Random(29)
    for _ in range(40):
        predictions, gold = random_dev_set(rng, quantized=False)
        best, report = tune_threshold(predictions, gold, "NER")
        for t in threshold_grid(0.01):
            kept = [k for k, s in predictions if s >= t]
            assert report.f1 >= score_keys(kept, gold, "NER").f1 - 1e-12
        kept_default = [k for k, s in predictions if s >= 0.5]
        assert report.f1 >= score_keys(kept_default, gold, "NER").f1 - 1e-12


def test_coarse_grid_matches_fine_grid_on_quantized_scores():
    rng = random.Random(37)
    for _ in range(30):
        predictions, gold = random_dev_set(rng, quantized=True)
        best_coarse, report_coarse = tune_threshold(predictions, gold, "NER", step=0.01)
        best_fine, report_fine = tune_threshold(predictions, gold, "NER", step=0.001)
        assert report_coarse.f1 == pytest.approx(report_fine.f1)
        assert abs(best_coarse - best_fine) <= 0.01 + 1e-9


def test_tie_rule_picks_largest_threshold():
    gold = {("d", 0, 0, 1, "PER")}
    best, _ = tune_threshold([(("d", 0, 0, 1, "PER"), 1.0)], gold, "NER")
    assert best == 1.0


def test_load_scored_items(samples_dir):
    items = load_scored_items((samples_dir / "pred_corpus.json").read_bytes(), "NER")
    assert len(items) == 8
    assert all(0.0 <= score <= 1.0 for _, score in items)
    keys = {key for key, _ in items}
    gold = load_corpus_json((samples_dir / "gold_corpus.json").read_bytes())
    assert len(keys & corpus_keys(gold, "NER")) == 6
