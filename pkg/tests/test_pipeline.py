from __future__ import annotations

import json
import random

import pytest

from entail_ie.backends import TransportError
from entail_ie.pipeline import (
    ConfigurationError,
    GoldEvent,
    GoldSpans,
    RunConfig,
    resolve_gold,
    run_e2e,
    run_task,
)
from entail_ie.preprocess import preprocess
from entail_ie.schema import Schema
from util import HashBackend, random_schema

VOCAB_NAMES = ["Alice", "Bob", "Rome", "Acme", "Paris", "Carol", "Zurich"]
VOCAB_OTHER = ["visited", "met", "the", "house", "in", "quietly"]


def random_text(rng: random.Random) -> str:
    sentences = []
    for _ in range(rng.randint(1, 3)):
        words = []
        for _ in range(rng.randint(2, 7)):
            pool = VOCAB_NAMES if rng.random() < 0.5 else VOCAB_OTHER
            words.append(rng.choice(pool))
        sentences.append(" ".join(words) + ".")
    return " ".join(sentences)


def test_e2e_sample_fixture(sample_schema, fixture_backend, sample_sentence):
    ann = run_e2e(sample_sentence, sample_schema, RunConfig(), fixture_backend)
    assert not ann.incomplete
    assert [(e.candidate.primary_span.text, e.label) for e in ann.entities] == [
        ("John Smith", "PERSON"),
        ("XYZ Corp.", "ORGANIZATION"),
        ("Florida", "GPE"),
        ("Sunday", "DATE"),
    ]
    assert [(e.label, e.candidate.primary_span.text, e.candidate.secondary_span.text) for e in ann.relations] == [
        ("EmployeeOf", "John Smith", "XYZ Corp.")
    ]
    assert [(e.label, e.score) for e in ann.events] == [("Life.Die", 0.96)]
    assert [(e.label, e.candidate.secondary_span.text) for e in ann.arguments] == [
        ("Victim", "John Smith"),
        ("Place", "Florida"),
        ("Time", "Sunday"),
    ]
    assert ann.schema_version == sample_schema.version
    assert ann.mode == "e2e"


def test_e2e_empty_text(sample_schema, fixture_backend):
    ann = run_e2e("", sample_schema, RunConfig(), fixture_backend)
    assert ann.sentences == ()
    assert ann.all_extractions() == ()
    assert not ann.incomplete


def test_e2e_schema_without_relations_or_roles(fixture_backend, sample_sentence, sample_schema):
    bare = Schema(entity_types=sample_schema.entity_types, event_types=sample_schema.event_types)
    ann = run_e2e(sample_sentence, bare, RunConfig(), fixture_backend)
    assert len(ann.entities) == 4
    assert len(ann.events) == 1
    assert ann.relations == ()
    assert ann.arguments == ()


def test_e2e_is_idempotent(sample_schema, fixture_backend, sample_sentence):
    first = run_e2e(sample_sentence, sample_schema, RunConfig(), fixture_backend)
    second = run_e2e(sample_sentence, sample_schema, RunConfig(), fixture_backend)
    assert first == second
    assert json.dumps(first.to_dict(), sort_keys=True) == json.dumps(second.to_dict(), sort_keys=True)


def test_dag_soundness(sample_schema, fixture_backend, sample_sentence):
    ann = run_e2e(sample_sentence, sample_schema, RunConfig(), fixture_backend)
    entity_spans = {e.candidate.primary_span for e in ann.entities}
    for rel in ann.relations:
        assert rel.candidate.primary_span in entity_spans
        assert rel.candidate.secondary_span in entity_spans
    event_keys = {(e.label, e.candidate.sentence_index) for e in ann.events}
    for arg in ann.arguments:
        assert (arg.candidate.context[0], arg.candidate.sentence_index) in event_keys
        assert arg.candidate.secondary_span in entity_spans


def test_run_task_ner_ignores_gold(sample_schema, fixture_backend, sample_sentence):
    sentences = preprocess(sample_sentence)
    gold = resolve_gold({"entities": [{"sentence": 0, "start": 0, "end": 4, "type": "PERSON"}]}, sentences)
    ann = run_task("NER", sample_sentence, gold, sample_schema, RunConfig(), fixture_backend)
    assert len(ann.entities) == 4  # NER ran; the gold single span was not echoed
    assert ann.relations == ()


def test_run_task_re_with_gold_entities(sample_schema, fixture_backend, sample_sentence):
    sentences = preprocess(sample_sentence)
    gold = resolve_gold(
        {
            "entities": [
                {"sentence": 0, "start": 0, "end": 10, "type": "PERSON"},
                {"sentence": 0, "start": 28, "end": 37, "type": "ORGANIZATION"},
            ]
        },
        sentences,
    )
    ann = run_task("RE", sample_sentence, gold, sample_schema, RunConfig(), fixture_backend)
    assert [(e.label, e.score) for e in ann.relations] == [("EmployeeOf", 0.9)]
    # gold entities echoed as provenance
    assert [(e.label, e.score, e.winning_template_id) for e in ann.entities] == [
        ("PERSON", 1.0, None),
        ("ORGANIZATION", 1.0, None),
    ]
    assert ann.events == ()
    assert ann.arguments == ()


def test_run_task_eae_with_gold(sample_schema, fixture_backend, sample_sentence):
    sentences = preprocess(sample_sentence)
    gold_data = {
        "entities": [
            {"sentence": 0, "start": 0, "end": 10, "type": "PERSON"},
            {"sentence": 0, "start": 47, "end": 54, "type": "GPE"},
            {"sentence": 0, "start": 58, "end": 64, "type": "DATE"},
        ],
        "events": [{"sentence": 0, "type": "Life.Die"}],
    }
    gold = resolve_gold(gold_data, sentences)
    ann = run_task("EAE", sample_sentence, gold, sample_schema, RunConfig(), fixture_backend)
    assert [(e.label, e.candidate.secondary_span.text) for e in ann.arguments] == [
        ("Victim", "John Smith"),
        ("Place", "Florida"),
        ("Time", "Sunday"),
    ]


def test_run_task_re_without_entity_source_errors(sample_schema, fixture_backend, sample_sentence):
    with pytest.raises(ConfigurationError):
        run_task("RE", sample_sentence, None, sample_schema, RunConfig(), fixture_backend)


def test_run_task_eae_without_event_source_errors(sample_schema, fixture_backend, sample_sentence):
    config = RunConfig(entity_source="ner")
    with pytest.raises(ConfigurationError):
        run_task("EAE", sample_sentence, None, sample_schema, config, fixture_backend)


def test_run_task_re_with_ner_fallback(sample_schema, fixture_backend, sample_sentence):
    config = RunConfig(entity_source="ner")
    ann = run_task("RE", sample_sentence, None, sample_schema, config, fixture_backend)
    assert [(e.label) for e in ann.relations] == ["EmployeeOf"]
    assert len(ann.entities) == 4  # internal NER output included as provenance


def test_resolve_gold_rejects_bad_offsets(sample_schema, sample_sentence):
    sentences = preprocess(sample_sentence)
    with pytest.raises(ConfigurationError):
        resolve_gold({"entities": [{"sentence": 0, "start": 5, "end": 999, "type": "PERSON"}]}, sentences)
    with pytest.raises(ConfigurationError):
        resolve_gold({"entities": [{"sentence": 3, "start": 0, "end": 2, "type": "PERSON"}]}, sentences)


def test_backend_failure_flags_incomplete(sample_schema, sample_sentence):
    class FailingBackend:
        def entail_batch(self, premise, hypotheses):
            raise TransportError("boom", retryable=False)

    ann = run_e2e(sample_sentence, sample_schema, RunConfig(), FailingBackend())
    assert ann.incomplete
    assert "boom" in ann.error
    assert ann.all_extractions() == ()


def test_mode_equivalence_on_fixture(sample_schema, fixture_backend, sample_sentence):
    config = RunConfig()
    e2e = run_e2e(sample_sentence, sample_schema, config, fixture_backend)
    chained = chain_tasks(sample_sentence, sample_schema, config, fixture_backend)
    assert e2e.entities == chained["entities"]
    assert e2e.events == chained["events"]
    assert e2e.relations == chained["relations"]
    assert e2e.arguments == chained["arguments"]


def chain_tasks(text, schema, config, backend):
    """Manually pipe run_task stages, feeding each stage's output as gold."""
    ner = run_task("NER", text, None, schema, config, backend)
    ee = run_task("EE", text, None, schema, config, backend)
    gold_entities = tuple(
        (e.candidate.primary_span, e.label) for e in ner.entities
    )
    gold_events = tuple(
        GoldEvent(event_type=e.label, sentence_index=e.candidate.sentence_index, span=e.candidate.primary_span)
        for e in ee.events
    )
    re_out = run_task("RE", text, GoldSpans(entities=gold_entities), schema, config, backend)
    eae_out = run_task(
        "EAE", text, GoldSpans(entities=gold_entities, events=gold_events), schema, config, backend
    )
    return {
        "entities": ner.entities,
        "events": ee.events,
        "relations": re_out.relations,
        "arguments": eae_out.arguments,
    }


def test_mode_equivalence_randomized():
    rng = random.Random(1234)
    backend = HashBackend()
    for _ in range(20):
        schema = random_schema(rng)
        config = RunConfig()
        text = random_text(rng)
        e2e = run_e2e(text, schema, config, backend)
        assert not e2e.incomplete
        chained = chain_tasks(text, schema, config, backend)
        assert e2e.entities == chained["entities"]
        assert e2e.events == chained["events"]
        assert e2e.relations == chained["relations"]
        assert e2e.arguments == chained["arguments"]


def test_trigger_mode_override(sample_schema, fixture_backend, sample_sentence):
    config = RunConfig(trigger_mode="trigger-span")
    ann = run_e2e(sample_sentence, sample_schema, config, fixture_backend)
    # Candidates switch to verb triggers; the slotless template still scores.
    assert [(e.label, e.candidate.primary_span.text) for e in ann.events] == [("Life.Die", "died")]


def test_parallel_jobs_preserve_output(sample_schema, fixture_backend, sample_sentence):
    sequential = run_e2e(sample_sentence, sample_schema, RunConfig(jobs=1), fixture_backend)
    parallel = run_e2e(sample_sentence, sample_schema, RunConfig(jobs=4), fixture_backend)
    assert sequential.entities == parallel.entities
    assert sequential.relations == parallel.relations
    assert sequential.events == parallel.events
    assert sequential.arguments == parallel.arguments


def test_run_config_file_round_trip(tmp_path, samples_dir):
    config = RunConfig.from_file(samples_dir / "run_config.json")
    assert config.backend == "mock:samples/oracle.json"
    assert config.threshold == 0.5
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config.to_dict()), encoding="utf-8")
    assert RunConfig.from_file(path) == config


def test_run_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "config.json"
    path.write_text('{"thresold": 0.4}', encoding="utf-8")
    with pytest.raises(ConfigurationError):
        RunConfig.from_file(path)
