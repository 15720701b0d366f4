from __future__ import annotations

import json

import pytest

from entail_ie.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_run_sample_fixture(capsys, samples_dir, tmp_path):
    out_file = tmp_path / "out.json"
    code, _, _ = run_cli(
        capsys,
        "run",
        "--schema", str(samples_dir / "schema.json"),
        "--backend", f"mock:{samples_dir / 'oracle.json'}",
        "--out", str(out_file),
        str(samples_dir / "sentence.txt"),
    )
    assert code == 0
    body = json.loads(out_file.read_text())
    assert [e["label"] for e in body["entities"]] == ["PERSON", "ORGANIZATION", "GPE", "DATE"]
    assert [e["label"] for e in body["events"]] == ["Life.Die"]
    assert [e["label"] for e in body["arguments"]] == ["Victim", "Place", "Time"]
    assert [e["label"] for e in body["relations"]] == ["EmployeeOf"]


def test_run_writes_stdout_by_default(capsys, samples_dir):
    code, out, _ = run_cli(
        capsys,
        "run",
        "--schema", str(samples_dir / "schema.json"),
        "--backend", f"mock:{samples_dir / 'oracle.json'}",
        str(samples_dir / "sentence.txt"),
    )
    assert code == 0
    assert json.loads(out)["provenance"]["mode"] == "e2e"


def test_run_missing_schema_exits_2(capsys, samples_dir, tmp_path):
    code, _, err = run_cli(
        capsys,
        "run",
        "--schema", str(tmp_path / "absent.json"),
        str(samples_dir / "sentence.txt"),
    )
    assert code == 2
    assert "not found" in err


def test_run_empty_input_file(capsys, samples_dir, tmp_path):
    empty = tmp_path / "empty.txt"
    empty.write_text("", encoding="utf-8")
    code, out, _ = run_cli(
        capsys,
        "run",
        "--schema", str(samples_dir / "schema.json"),
        str(empty),
    )
    assert code == 0
    body = json.loads(out)
    assert body["entities"] == [] and body["sentences"] == []


def test_run_task_mode_requires_task(capsys, samples_dir):
    code, _, err = run_cli(
        capsys,
        "run",
        "--schema", str(samples_dir / "schema.json"),
        "--mode", "task",
        str(samples_dir / "sentence.txt"),
    )
    assert code == 2
    assert "--task" in err


def test_eval_gold_equals_predictions(capsys, samples_dir):
    code, out, err = run_cli(
        capsys,
        "eval",
        "--task", "NER",
        "--gold", str(samples_dir / "gold_corpus.json"),
        "--pred", str(samples_dir / "gold_corpus.json"),
    )
    assert code == 0
    report = json.loads(out)
    assert report["f1"] == 1.0
    assert "micro" in err


def test_eval_hand_computed_fixture(capsys, samples_dir):
    code, out, _ = run_cli(
        capsys,
        "eval",
        "--task", "NER",
        "--gold", str(samples_dir / "gold_corpus.json"),
        "--pred", str(samples_dir / "pred_corpus.json"),
    )
    assert code == 0
    report = json.loads(out)
    assert report["precision"] == pytest.approx(0.75)
    assert report["recall"] == pytest.approx(0.75)


def test_eval_conll_misc_removed(capsys, samples_dir, tmp_path):
    pred = {
        "documents": [
            {
                "doc_id": "doc0",
                "sentences": ["John Smith visited Paris .", "The Olympics ended ."],
                "entities": [
                    {"sentence": 0, "start": 0, "end": 10, "type": "PER"},
                    {"sentence": 0, "start": 19, "end": 24, "type": "LOC"},
                ],
            }
        ]
    }
    pred_path = tmp_path / "pred.json"
    pred_path.write_text(json.dumps(pred), encoding="utf-8")
    code, out, _ = run_cli(
        capsys,
        "eval",
        "--task", "NER",
        "--gold", str(samples_dir / "gold_ner.conll"),
        "--pred", str(pred_path),
    )
    assert code == 0
    report = json.loads(out)
    # Olympics was MISC in the gold file: relabeled to O, so no false negative.
    assert report["f1"] == 1.0


def test_eval_bad_gold_exits_2(capsys, tmp_path, samples_dir):
    bad = tmp_path / "bad.json"
    bad.write_text("{", encoding="utf-8")
    code, _, err = run_cli(
        capsys,
        "eval", "--task", "NER", "--gold", str(bad), "--pred", str(samples_dir / "pred_corpus.json"),
    )
    assert code == 2


def test_tune_threshold_fixture(capsys, samples_dir, tmp_path):
    gold = {
        "documents": [
            {
                "doc_id": "d",
                "sentences": ["x" * 80],
                "entities": [{"sentence": 0, "start": i, "end": i + 1, "type": "PER"} for i in range(5)],
            }
        ]
    }
    pred = {
        "documents": [
            {
                "doc_id": "d",
                "sentences": ["x" * 80],
                "entities": (
                    [{"sentence": 0, "start": i, "end": i + 1, "type": "PER", "score": 0.9} for i in range(5)]
                    + [{"sentence": 0, "start": 50 + i, "end": 51 + i, "type": "PER", "score": 0.1} for i in range(3)]
                ),
            }
        ]
    }
    gold_path = tmp_path / "gold.json"
    pred_path = tmp_path / "pred.json"
    gold_path.write_text(json.dumps(gold), encoding="utf-8")
    pred_path.write_text(json.dumps(pred), encoding="utf-8")
    code, out, err = run_cli(
        capsys,
        "tune-threshold",
        "--task", "NER", "--gold", str(gold_path), "--pred", str(pred_path),
    )
    assert code == 0
    result = json.loads(out)
    assert result["best_threshold"] == pytest.approx(0.90)
    assert "best threshold: 0.90" in err


def test_tune_empty_dev_set_exits_2(capsys, samples_dir, tmp_path):
    empty_pred = tmp_path / "empty.json"
    empty_pred.write_text(json.dumps({"documents": []}), encoding="utf-8")
    code, _, err = run_cli(
        capsys,
        "tune-threshold",
        "--task", "NER",
        "--gold", str(samples_dir / "gold_corpus.json"),
        "--pred", str(empty_pred),
    )
    assert code == 2
    assert "empty dev set" in err


def test_live_eval_with_mock_backend(capsys, samples_dir, tmp_path):
    gold = {
        "documents": [
            {
                "doc_id": "d",
                "sentences": ["John Smith, an executive at XYZ Corp., died in Florida on Sunday"],
                "entities": [
                    {"sentence": 0, "start": 0, "end": 10, "type": "PERSON"},
                    {"sentence": 0, "start": 28, "end": 37, "type": "ORGANIZATION"},
                    {"sentence": 0, "start": 47, "end": 54, "type": "GPE"},
                    {"sentence": 0, "start": 58, "end": 64, "type": "DATE"},
                ],
            }
        ]
    }
    gold_path = tmp_path / "gold.json"
    gold_path.write_text(json.dumps(gold), encoding="utf-8")
    code, out, _ = run_cli(
        capsys,
        "eval",
        "--task", "NER",
        "--gold", str(gold_path),
        "--live",
        "--schema", str(samples_dir / "schema.json"),
        "--backend", f"mock:{samples_dir / 'oracle.json'}",
    )
    assert code == 0
    assert json.loads(out)["f1"] == 1.0
