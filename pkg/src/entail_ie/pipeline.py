"""Task orchestration over a document.

End-to-end mode runs the full dependency graph: preprocessing feeds NER, NER
feeds relation and argument extraction, event detection feeds argument
extraction, and every stage shares one schema snapshot. Task mode runs a single
task, substituting user-supplied gold spans for the upstream stages; relation
and argument extraction without any entity (or event) source is a
configuration error unless the run config enables the pipeline fallback.

Stage failures do not degrade silently: a backend failure aborts the run and
the partial result is flagged ``incomplete`` so nothing downstream mistakes it
for a full analysis.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence, TypeVar

from .backends import BackendError, EntailmentBackend
from .candidates import (
    DEFAULT_NER_PATTERNS,
    DEFAULT_TRIGGER_TAGS,
    TASK_EAE,
    TASK_EE,
    TASK_NER,
    TASK_RE,
    Candidate,
    Span,
    argument_candidates,
    ner_candidates,
    relation_pair_candidates,
    trigger_candidates,
)
from .inference import Extraction, InferenceConfig, classify_candidate, classify_events, extraction_id
from .preprocess import RuleTagger, Sentence, TaggerBackend, TaggerTransportError, preprocess
from .schema import TRIGGER_MODES, Schema
from .verbalize import hypotheses_for

MODE_E2E = "e2e"
MODE_TASK = "task"

TASKS = (TASK_NER, TASK_RE, TASK_EE, TASK_EAE)

_T = TypeVar("_T")
_R = TypeVar("_R")


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    threshold: float = 0.5
    task_thresholds: dict = field(default_factory=dict)
    pos_patterns: tuple[str, ...] = DEFAULT_NER_PATTERNS
    trigger_tags: tuple[str, ...] = DEFAULT_TRIGGER_TAGS
    trigger_mode: str | None = None  # overrides every event type's mode when set
    entity_source: str = "none"  # "none" | "ner": task-mode fallback for RE/EAE
    event_source: str = "none"  # "none" | "ee": task-mode fallback for EAE
    backend: str = "mock:"
    tagger: str = "builtin"
    max_batch: int = 32
    jobs: int = 0  # 0 = one worker per available CPU

    def __post_init__(self):
        for value in (self.threshold, *self.task_thresholds.values()):
            if not 0.0 <= value <= 1.0:
                raise ConfigurationError(f"threshold {value} outside [0, 1]")
        if self.trigger_mode is not None and self.trigger_mode not in TRIGGER_MODES:
            raise ConfigurationError(f"unknown trigger_mode {self.trigger_mode!r}")
        if self.entity_source not in ("none", "ner"):
            raise ConfigurationError(f"unknown entity_source {self.entity_source!r}")
        if self.event_source not in ("none", "ee"):
            raise ConfigurationError(f"unknown event_source {self.event_source!r}")
        if self.max_batch < 1:
            raise ConfigurationError("max_batch must be >= 1")
        if self.jobs < 0:
            raise ConfigurationError("jobs must be >= 0 (0 = all CPUs)")

    def inference_config(self) -> InferenceConfig:
        return InferenceConfig(threshold=self.threshold, task_thresholds=dict(self.task_thresholds))

    def to_dict(self) -> dict:
        return {
            "threshold": self.threshold,
            "task_thresholds": dict(self.task_thresholds),
            "pos_patterns": list(self.pos_patterns),
            "trigger_tags": list(self.trigger_tags),
            "trigger_mode": self.trigger_mode,
            "entity_source": self.entity_source,
            "event_source": self.event_source,
            "backend": self.backend,
            "tagger": self.tagger,
            "max_batch": self.max_batch,
            "jobs": self.jobs,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigurationError("run config must be a JSON object")
        known = {
            "threshold": float,
            "task_thresholds": dict,
            "pos_patterns": tuple,
            "trigger_tags": tuple,
            "trigger_mode": lambda v: v,
            "entity_source": str,
            "event_source": str,
            "backend": str,
            "tagger": str,
            "max_batch": int,
            "jobs": int,
        }
        kwargs = {}
        for key, value in data.items():
            conv = known.get(key)
            if conv is None:
                raise ConfigurationError(f"unknown run config key {key!r}")
            kwargs[key] = conv(value) if conv is not tuple else tuple(value)
        try:
            return cls(**kwargs)
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(str(exc)) from None

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"run config {path}: {exc.msg} (line {exc.lineno})") from None
        return cls.from_dict(data)


@dataclass(frozen=True)
class GoldEvent:
    event_type: str
    sentence_index: int
    span: Span | None = None


@dataclass(frozen=True)
class GoldSpans:
    entities: tuple[tuple[Span, str], ...] = ()
    events: tuple[GoldEvent, ...] = ()


@dataclass(frozen=True)
class DocumentAnnotations:
    text: str
    sentences: tuple[Sentence, ...]
    entities: tuple[Extraction, ...] = ()
    relations: tuple[Extraction, ...] = ()
    events: tuple[Extraction, ...] = ()
    arguments: tuple[Extraction, ...] = ()
    mode: str = MODE_E2E
    schema_version: int = 1
    config: dict = field(default_factory=dict)
    incomplete: bool = False
    error: str | None = None

    def all_extractions(self) -> tuple[Extraction, ...]:
        return self.entities + self.relations + self.events + self.arguments

    def to_dict(self, top: int | None = None) -> dict:
        return {
            "text": self.text,
            "provenance": {
                "mode": self.mode,
                "schema_version": self.schema_version,
                "config": self.config,
            },
            "incomplete": self.incomplete,
            "error": self.error,
            "sentences": [
                {
                    "index": s.index,
                    "text": s.text,
                    "tokens": [
                        {"text": t.text, "start": t.char_start, "end": t.char_end, "pos": t.pos}
                        for t in s.tokens
                    ],
                }
                for s in self.sentences
            ],
            "entities": [e.to_dict(top) for e in self.entities],
            "relations": [e.to_dict(top) for e in self.relations],
            "events": [e.to_dict(top) for e in self.events],
            "arguments": [e.to_dict(top) for e in self.arguments],
        }


def resolve_gold(data: dict, sentences: Sequence[Sentence]) -> GoldSpans:
    """Build GoldSpans from raw JSON, slicing span text out of the sentences.

    Raises ConfigurationError when offsets do not fit their sentence.
    """

    def make_span(sent: int, start: int, end: int) -> Span:
        if not 0 <= sent < len(sentences):
            raise ConfigurationError(f"gold span references missing sentence {sent}")
        text = sentences[sent].text
        if not (0 <= start < end <= len(text)):
            raise ConfigurationError(f"gold span [{start}, {end}) outside sentence {sent}")
        return Span(sentence_index=sent, char_start=start, char_end=end, text=text[start:end])

    entities = []
    for raw in data.get("entities", []):
        try:
            entities.append(
                (make_span(int(raw["sentence"]), int(raw["start"]), int(raw["end"])), str(raw["type"]))
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"bad gold entity {raw!r}: {exc}") from None
    events = []
    for raw in data.get("events", []):
        try:
            sent = int(raw["sentence"])
            span = None
            if raw.get("start") is not None:
                span = make_span(sent, int(raw["start"]), int(raw["end"]))
            events.append(GoldEvent(event_type=str(raw["type"]), sentence_index=sent, span=span))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"bad gold event {raw!r}: {exc}") from None
    return GoldSpans(entities=tuple(entities), events=tuple(events))


def _map_ordered(fn: Callable[[_T], _R], items: Sequence[_T], jobs: int) -> list[_R]:
    workers = jobs if jobs else (os.cpu_count() or 1)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _gold_echo(task: str, candidate: Candidate, label: str) -> Extraction:
    return Extraction(
        id="gold:" + extraction_id(task, candidate, label),
        task=task,
        candidate=candidate,
        label=label,
        score=1.0,
        winning_template_id=None,
        ranked=(),
    )


class _Runner:
    """One document run; holds the resolved schema, config and backends."""

    def __init__(
        self,
        schema: Schema,
        config: RunConfig,
        backend: EntailmentBackend,
        tagger: TaggerBackend | None,
    ):
        if config.trigger_mode is not None:
            schema = replace(
                schema,
                event_types=tuple(
                    replace(ev, trigger_mode=config.trigger_mode) for ev in schema.event_types
                ),
            )
        self.schema = schema
        self.config = config
        self.backend = backend
        self.tagger = tagger or RuleTagger()
        self.inference = config.inference_config()

    def preprocess(self, text: str) -> list[Sentence]:
        return preprocess(text, self.tagger)

    def _premise(self, sentences: Sequence[Sentence], candidate: Candidate) -> str:
        return sentences[candidate.sentence_index].text

    def _classify(self, sentences: Sequence[Sentence], cands: Sequence[Candidate]) -> list[Extraction]:
        def run(cand: Candidate) -> Extraction:
            return classify_candidate(
                self._premise(sentences, cand),
                cand,
                hypotheses_for(cand, self.schema),
                self.backend,
                self.inference,
            )

        return _map_ordered(run, cands, self.config.jobs)

    def ner(self, sentences: Sequence[Sentence]) -> list[Extraction]:
        if not self.schema.entity_types:
            return []
        cands = [c for s in sentences for c in ner_candidates(s, self.config.pos_patterns)]
        return [e for e in self._classify(sentences, cands) if e.is_positive()]

    def events(self, sentences: Sequence[Sentence]) -> list[Extraction]:
        modes = {ev.trigger_mode for ev in self.schema.event_types}
        cands: list[Candidate] = []
        for sentence in sentences:
            for mode in TRIGGER_MODES:
                if mode in modes:
                    cands.extend(trigger_candidates(sentence, mode, self.config.trigger_tags))

        def run(cand: Candidate) -> list[Extraction]:
            return classify_events(
                self._premise(sentences, cand),
                hypotheses_for(cand, self.schema),
                self.backend,
                self.inference,
            )

        return [e for group in _map_ordered(run, cands, self.config.jobs) for e in group]

    def relations(
        self, sentences: Sequence[Sentence], entities: Sequence[tuple[Span, str]]
    ) -> list[Extraction]:
        cands = relation_pair_candidates(entities, self.schema)
        return [e for e in self._classify(sentences, cands) if e.is_positive()]

    def arguments(
        self,
        sentences: Sequence[Sentence],
        events: Sequence[GoldEvent],
        entities: Sequence[tuple[Span, str]],
    ) -> list[Extraction]:
        cands = [
            c
            for ev in events
            for c in argument_candidates(ev.event_type, ev.span, ev.sentence_index, entities, self.schema)
        ]
        return [e for e in self._classify(sentences, cands) if e.is_positive()]


def _entity_pairs(extractions: Sequence[Extraction]) -> tuple[tuple[Span, str], ...]:
    return tuple(
        (e.candidate.primary_span, e.label)
        for e in extractions
        if e.candidate.primary_span is not None
    )


def _event_mentions(extractions: Sequence[Extraction]) -> tuple[GoldEvent, ...]:
    return tuple(
        GoldEvent(
            event_type=e.label,
            sentence_index=e.candidate.sentence_index,
            span=e.candidate.primary_span,
        )
        for e in extractions
    )


def run_e2e(
    text: str,
    schema: Schema,
    config: RunConfig,
    backend: EntailmentBackend,
    tagger: TaggerBackend | None = None,
) -> DocumentAnnotations:
    """Run the full task graph over one document."""
    runner = _Runner(schema, config, backend, tagger)
    base = DocumentAnnotations(
        text=text,
        sentences=(),
        mode=MODE_E2E,
        schema_version=schema.version,
        config=config.to_dict(),
    )
    try:
        sentences = tuple(runner.preprocess(text))
        entities = tuple(runner.ner(sentences))
        relations = tuple(runner.relations(sentences, _entity_pairs(entities)))
        events = tuple(runner.events(sentences))
        arguments = tuple(
            runner.arguments(sentences, _event_mentions(events), _entity_pairs(entities))
        )
    except (BackendError, TaggerTransportError) as exc:
        return replace(base, incomplete=True, error=str(exc))
    return replace(
        base,
        sentences=sentences,
        entities=entities,
        relations=relations,
        events=events,
        arguments=arguments,
    )


def run_task(
    task: str,
    text: str,
    gold: GoldSpans | None,
    schema: Schema,
    config: RunConfig,
    backend: EntailmentBackend,
    tagger: TaggerBackend | None = None,
) -> DocumentAnnotations:
    """Run a single task; gold spans substitute for the upstream stages.

    NER and event detection ignore gold (they have no upstream extraction
    stage). Gold entities and events are echoed into the result as synthetic
    extractions (score 1.0, no template) so responses are self-contained.
    """
    if task not in TASKS:
        raise ConfigurationError(f"unknown task {task!r}")
    runner = _Runner(schema, config, backend, tagger)
    base = DocumentAnnotations(
        text=text,
        sentences=(),
        mode=MODE_TASK,
        schema_version=schema.version,
        config=config.to_dict(),
    )
    try:
        sentences = tuple(runner.preprocess(text))
        base = replace(base, sentences=sentences)

        if task == TASK_NER:
            return replace(base, entities=tuple(runner.ner(sentences)))
        if task == TASK_EE:
            return replace(base, events=tuple(runner.events(sentences)))

        # RE and EAE need an entity source. Supplied gold substitutes for NER,
        # even when it lists zero spans; otherwise the configured fallback runs.
        if gold is not None and gold.entities:
            entity_pairs = gold.entities
            entity_extractions = tuple(
                _gold_echo(
                    TASK_NER,
                    Candidate(task=TASK_NER, sentence_index=span.sentence_index, primary_span=span),
                    label,
                )
                for span, label in gold.entities
            )
        elif config.entity_source == "ner":
            ner_out = tuple(runner.ner(sentences))
            entity_pairs = _entity_pairs(ner_out)
            entity_extractions = ner_out
        elif gold is not None:
            entity_pairs = ()
            entity_extractions = ()
        else:
            raise ConfigurationError(
                f"{task} requires gold entities or entity_source='ner' in the run config"
            )

        if task == TASK_RE:
            return replace(
                base,
                entities=entity_extractions,
                relations=tuple(runner.relations(sentences, entity_pairs)),
            )

        # EAE additionally needs an event source, with the same gold semantics.
        if gold is not None and gold.events:
            event_mentions = gold.events
            event_extractions = tuple(
                _gold_echo(
                    TASK_EE,
                    Candidate(
                        task=TASK_EE, sentence_index=ev.sentence_index, primary_span=ev.span
                    ),
                    ev.event_type,
                )
                for ev in gold.events
            )
        elif config.event_source == "ee":
            ee_out = tuple(runner.events(sentences))
            event_mentions = _event_mentions(ee_out)
            event_extractions = ee_out
        elif gold is not None:
            event_mentions = ()
            event_extractions = ()
        else:
            raise ConfigurationError(
                "EAE requires gold events or event_source='ee' in the run config"
            )

        return replace(
            base,
            entities=entity_extractions,
            events=event_extractions,
            arguments=tuple(runner.arguments(sentences, event_mentions, entity_pairs)),
        )
    except (BackendError, TaggerTransportError) as exc:
        return replace(base, incomplete=True, error=str(exc))
