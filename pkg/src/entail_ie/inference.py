"""The entailment decision rule.

Every hypothesis for a candidate is scored; a type's score is the maximum
entailment probability over its templates. Single-label tasks (NER, RE, EAE)
pick the highest-scoring type if it reaches the threshold and otherwise return
the negative class. Event detection is multi-label: every event type at or
above the threshold yields its own extraction. Only the entailment probability
enters the decision; the neutral and contradiction mass is transported for
display. Ties break by schema declaration order, then template order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .backends import EntailmentBackend
from .candidates import TASK_EE, Candidate
from .verbalize import Hypothesis

NEGATIVE_LABEL = "NEGATIVE"

DEFAULT_THRESHOLD = 0.5


@dataclass(frozen=True)
class InferenceConfig:
    threshold: float = DEFAULT_THRESHOLD
    task_thresholds: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for t in (self.threshold, *self.task_thresholds.values()):
            if not 0.0 <= t <= 1.0:
                raise ValueError(f"threshold {t} outside [0, 1]")

    def threshold_for(self, task: str) -> float:
        return self.task_thresholds.get(task, self.threshold)


@dataclass(frozen=True)
class TypeScore:
    """Best score one type achieved for a candidate, with the template that did it."""

    label: str
    score: float
    template_id: str


@dataclass(frozen=True)
class Extraction:
    id: str
    task: str
    candidate: Candidate
    label: str
    score: float
    winning_template_id: str | None
    ranked: tuple[TypeScore, ...]

    @property
    def all_scores(self) -> dict[str, float]:
        return {ts.label: ts.score for ts in self.ranked}

    def is_positive(self) -> bool:
        return self.label != NEGATIVE_LABEL

    def to_dict(self, top: int | None = None) -> dict:
        ranked = self.ranked if top is None else self.ranked[:top]
        return {
            "id": self.id,
            "task": self.task,
            "label": self.label,
            "score": self.score,
            "template_id": self.winning_template_id,
            "span": self.candidate.primary_span.to_dict() if self.candidate.primary_span else None,
            "secondary_span": (
                self.candidate.secondary_span.to_dict() if self.candidate.secondary_span else None
            ),
            "sentence": self.candidate.sentence_index,
            "context": list(self.candidate.context) if self.candidate.context else None,
            "ranked": [
                {"type": ts.label, "score": ts.score, "template_id": ts.template_id}
                for ts in ranked
            ],
        }


def _span_key(span) -> str:
    return f"{span.char_start}-{span.char_end}" if span is not None else "sent"


def extraction_id(task: str, candidate: Candidate, label: str) -> str:
    """Deterministic id: same candidate and decision always map to the same id."""
    parts = [task.lower(), str(candidate.sentence_index), _span_key(candidate.primary_span)]
    if candidate.secondary_span is not None:
        parts.append(_span_key(candidate.secondary_span))
    parts.append(label)
    return ":".join(parts)


def _best_per_type(
    hypotheses: Sequence[Hypothesis], scores: Sequence[float]
) -> list[TypeScore]:
    """Per-type max entailment in first-encounter (schema) order.

    Strict comparison keeps the earliest template on ties, and the returned
    list keeps declaration order for downstream tie-breaking.
    """
    order: list[str] = []
    best: dict[str, TypeScore] = {}
    for hyp, p in zip(hypotheses, scores):
        cur = best.get(hyp.label)
        if cur is None:
            order.append(hyp.label)
            best[hyp.label] = TypeScore(label=hyp.label, score=p, template_id=hyp.template_id)
        elif p > cur.score:
            best[hyp.label] = TypeScore(label=hyp.label, score=p, template_id=hyp.template_id)
    return [best[label] for label in order]


def _ranked(per_type: Sequence[TypeScore]) -> tuple[TypeScore, ...]:
    decl_index = {ts.label: i for i, ts in enumerate(per_type)}
    return tuple(sorted(per_type, key=lambda ts: (-ts.score, decl_index[ts.label])))


def classify_candidate(
    premise: str,
    candidate: Candidate,
    hypotheses: Sequence[Hypothesis],
    backend: EntailmentBackend,
    config: InferenceConfig,
) -> Extraction:
    """Single-label decision for NER, RE and EAE candidates.

    With no hypotheses the result is the negative class at score 0. When every
    type falls below the threshold the extraction is negative but keeps the
    best score, template and full ranking for display.
    """
    if not hypotheses:
        return Extraction(
            id=extraction_id(candidate.task, candidate, NEGATIVE_LABEL),
            task=candidate.task,
            candidate=candidate,
            label=NEGATIVE_LABEL,
            score=0.0,
            winning_template_id=None,
            ranked=(),
        )
    scores = backend.entail_batch(premise, [h.text for h in hypotheses])
    per_type = _best_per_type(hypotheses, [s.entail for s in scores])
    winner = per_type[0]
    for ts in per_type[1:]:
        if ts.score > winner.score:
            winner = ts
    threshold = config.threshold_for(candidate.task)
    positive = winner.score >= threshold
    label = winner.label if positive else NEGATIVE_LABEL
    return Extraction(
        id=extraction_id(candidate.task, candidate, label),
        task=candidate.task,
        candidate=candidate,
        label=label,
        score=winner.score,
        winning_template_id=winner.template_id,
        ranked=_ranked(per_type),
    )


def classify_events(
    premise: str,
    hypotheses: Sequence[Hypothesis],
    backend: EntailmentBackend,
    config: InferenceConfig,
) -> list[Extraction]:
    """Multi-label event decision: one positive extraction per event type whose
    best template reaches the threshold; nothing qualifies, nothing emitted."""
    if not hypotheses:
        return []
    candidate = hypotheses[0].candidate
    scores = backend.entail_batch(premise, [h.text for h in hypotheses])
    per_type = _best_per_type(hypotheses, [s.entail for s in scores])
    ranked = _ranked(per_type)
    threshold = config.threshold_for(TASK_EE)
    out = []
    for ts in per_type:
        if ts.score >= threshold:
            out.append(
                Extraction(
                    id=extraction_id(TASK_EE, candidate, ts.label),
                    task=TASK_EE,
                    candidate=candidate,
                    label=ts.label,
                    score=ts.score,
                    winning_template_id=ts.template_id,
                    ranked=ranked,
                )
            )
    return out
