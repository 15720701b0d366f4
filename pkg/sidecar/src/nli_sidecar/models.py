"""Scoring models behind the sidecar.

Two implementations: a deterministic hash-based model for tests and offline
demos, and a transformers-backed model for real checkpoints. Checkpoints
disagree on which output index means entailment, and a silent misordering
would invert every downstream decision, so the label order is resolved
explicitly: from the checkpoint's id2label names when they are recognizable,
from a table of known checkpoint families otherwise, or from an explicit
override. Loading fails loudly when none of those applies.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Protocol, Sequence

Triple = tuple[float, float, float]  # (entail, neutral, contradict)

CANONICAL = ("entail", "neutral", "contradict")

# Output-index order (entail, neutral, contradict) per known checkpoint family.
KNOWN_LABEL_ORDERS: dict[str, tuple[int, int, int]] = {
    "roberta-large-mnli": (2, 1, 0),
    "facebook/bart-large-mnli": (2, 1, 0),
    "microsoft/deberta-large-mnli": (2, 1, 0),
    "microsoft/deberta-xlarge-mnli": (2, 1, 0),
    "microsoft/deberta-v2-xlarge-mnli": (2, 1, 0),
    "microsoft/deberta-v2-xxlarge-mnli": (2, 1, 0),
    "ynie/roberta-large-snli_mnli_fever_anli_R1_R2_R3-nli": (0, 1, 2),
    "cross-encoder/nli-deberta-v3-base": (1, 2, 0),
    "cross-encoder/nli-deberta-v3-large": (1, 2, 0),
}

_NAME_ALIASES = {
    "entail": "entail",
    "entailment": "entail",
    "neutral": "neutral",
    "contradict": "contradict",
    "contradiction": "contradict",
}


class LabelOrderError(RuntimeError):
    """The checkpoint's output order could not be determined safely."""


class ScoringModel(Protocol):
    def score(self, premise: str, hypotheses: Sequence[str]) -> list[Triple]:
        """One (entail, neutral, contradict) triple per hypothesis, input order."""
        ...


def parse_label_order(spec: str) -> tuple[int, int, int]:
    """Parse an override like ``contradiction,neutral,entailment`` (index order)
    into positions of (entail, neutral, contradict) in the model output."""
    names = [_NAME_ALIASES.get(part.strip().lower()) for part in spec.split(",")]
    if len(names) != 3 or set(names) != set(CANONICAL):
        raise LabelOrderError(
            f"label order {spec!r} must name entailment, neutral and contradiction once each"
        )
    return tuple(names.index(c) for c in CANONICAL)  # type: ignore[return-value]


def resolve_label_order(
    model_id: str,
    id2label: dict[int, str] | None,
    override: str | None = None,
) -> tuple[int, int, int]:
    """Positions of (entail, neutral, contradict) in the model's output vector."""
    if override:
        return parse_label_order(override)
    if id2label:
        named = {}
        for index, raw in id2label.items():
            alias = _NAME_ALIASES.get(str(raw).strip().lower())
            if alias:
                named[alias] = int(index)
        if set(named) == set(CANONICAL):
            return (named["entail"], named["neutral"], named["contradict"])
    if model_id in KNOWN_LABEL_ORDERS:
        return KNOWN_LABEL_ORDERS[model_id]
    raise LabelOrderError(
        f"cannot determine the (entailment, neutral, contradiction) output order for "
        f"{model_id!r}; pass --label-order explicitly"
    )


class HashScoringModel:
    """Deterministic stand-in model: scores derive from a content hash.

    The same (premise, hypothesis) pair always yields the same simplex, across
    processes and machines, which makes it usable for protocol conformance
    tests and regression fixtures without any checkpoint download.
    """

    name = "dummy"

    def score(self, premise: str, hypotheses: Sequence[str]) -> list[Triple]:
        return [self._score_one(premise, h) for h in hypotheses]

    @staticmethod
    def _score_one(premise: str, hypothesis: str) -> Triple:
        digest = hashlib.sha256(f"{premise}\x1f{hypothesis}".encode("utf-8")).digest()
        logits = [int.from_bytes(digest[i : i + 4], "big") / 2**32 * 8 - 4 for i in (0, 4, 8)]
        peak = max(logits)
        exps = [math.exp(v - peak) for v in logits]
        total = sum(exps)
        entail, neutral, contradict = (v / total for v in exps)
        return (entail, neutral, contradict)


@dataclass
class TransformersModel:
    """Wraps a sequence-classification checkpoint fine-tuned on an NLI dataset."""

    model_id: str
    device: str = "cpu"
    label_order: str | None = None

    def __post_init__(self):
        try:
            import torch
            from transformers import AutoModelForSequenceClassification, AutoTokenizer
        except ImportError as exc:  # pragma: no cover - env without the extra
            raise RuntimeError(
                "transformers/torch are required for checkpoint models; "
                "install nli-sidecar[models]"
            ) from exc
        self._torch = torch
        self._tokenizer = AutoTokenizer.from_pretrained(self.model_id)
        self._model = AutoModelForSequenceClassification.from_pretrained(self.model_id)
        self._model.to(self.device)
        self._model.eval()
        id2label = getattr(self._model.config, "id2label", None)
        self._order = resolve_label_order(self.model_id, id2label, self.label_order)

    def score(self, premise: str, hypotheses: Sequence[str]) -> list[Triple]:
        torch = self._torch
        encoded = self._tokenizer(
            [premise] * len(hypotheses),
            list(hypotheses),
            padding=True,
            truncation=True,
            return_tensors="pt",
        ).to(self.device)
        with torch.no_grad():
            logits = self._model(**encoded).logits
            probs = torch.softmax(logits, dim=-1).cpu().tolist()
        e, n, c = self._order
        return [(row[e], row[n], row[c]) for row in probs]


def load_model(spec: str, device: str = "cpu", label_order: str | None = None) -> ScoringModel:
    """``dummy`` for the hash model, anything else is a transformers checkpoint id."""
    if spec == "dummy":
        return HashScoringModel()
    return TransformersModel(model_id=spec, device=device, label_order=label_order)
