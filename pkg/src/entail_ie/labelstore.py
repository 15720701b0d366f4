"""User correctness labels and the metrics board.

Extractions a user can judge are registered first; ``+``/``-`` verdicts are
recorded against their ids, and relabeling overwrites. Everything lives in one
append-only JSON-lines log (one record per registered extraction or label), so
state is diff-able, crash-safe and survives restarts; ``compact()`` rewrites
the log keeping only current state.

Metrics are computed on read at three granularities: per task, per type and per
template. ``total`` counts registered (winning) extractions; ``correct`` and
``incorrect`` count current verdicts; accuracy is correct / (correct +
incorrect) and absent while nothing in scope is labeled.

Dev-set export is one JSON-lines record per labeled extraction with the full
extraction payload embedded, so a dev set is self-contained and re-importable.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import IO

from .schema import Schema

VERDICT_CORRECT = "correct"
VERDICT_INCORRECT = "incorrect"
VERDICTS = (VERDICT_CORRECT, VERDICT_INCORRECT)

SCOPE_TASK = "task"
SCOPE_TYPE = "type"
SCOPE_TEMPLATE = "template"
SCOPES = (SCOPE_TASK, SCOPE_TYPE, SCOPE_TEMPLATE)

SORT_KEYS = ("name", "total", "correct", "incorrect", "accuracy")


class UnknownExtractionError(KeyError):
    pass


class DevsetFormatError(ValueError):
    pass


@dataclass(frozen=True)
class UserLabel:
    extraction_id: str
    verdict: str
    timestamp: float


@dataclass(frozen=True)
class MetricsRow:
    scope: str
    name: str  # task, "task/type" or "task/type/template_id"
    total: int
    correct: int
    incorrect: int
    accuracy: float | None

    def to_dict(self) -> dict:
        return {
            "scope": self.scope,
            "name": self.name,
            "total": self.total,
            "correct": self.correct,
            "incorrect": self.incorrect,
            "accuracy": self.accuracy,
        }


def extraction_payload(extraction, premise: str) -> dict:
    """The record stored per extraction: everything the dev set needs."""
    return {
        "id": extraction.id,
        "task": extraction.task,
        "label": extraction.label,
        "template_id": extraction.winning_template_id,
        "score": extraction.score,
        "premise": premise,
        "span": extraction.candidate.primary_span.to_dict()
        if extraction.candidate.primary_span
        else None,
        "secondary_span": extraction.candidate.secondary_span.to_dict()
        if extraction.candidate.secondary_span
        else None,
        "sentence": extraction.candidate.sentence_index,
    }


class LabelStore:
    """Single-writer label log with read-your-writes metrics."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self._extractions: dict[str, dict] = {}
        self._labels: dict[str, UserLabel] = {}
        self._fh: IO[str] | None = None
        if self.path is not None and self.path.exists():
            self._replay(self.path.read_text(encoding="utf-8"))
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._fh = self.path.open("a", encoding="utf-8")

    # -- log plumbing ---------------------------------------------------

    def _replay(self, text: str) -> None:
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DevsetFormatError(f"label log line {lineno}: {exc.msg}") from None
            self._apply(record, lineno)

    def _apply(self, record: dict, lineno: int) -> None:
        kind = record.get("kind")
        if kind == "extraction":
            payload = record.get("extraction")
            if not isinstance(payload, dict) or "id" not in payload:
                raise DevsetFormatError(f"label log line {lineno}: bad extraction record")
            self._extractions[payload["id"]] = payload
        elif kind == "label":
            try:
                label = UserLabel(
                    extraction_id=str(record["extraction_id"]),
                    verdict=str(record["verdict"]),
                    timestamp=float(record["timestamp"]),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise DevsetFormatError(f"label log line {lineno}: {exc}") from None
            if label.verdict not in VERDICTS:
                raise DevsetFormatError(f"label log line {lineno}: bad verdict {label.verdict!r}")
            self._labels[label.extraction_id] = label
        else:
            raise DevsetFormatError(f"label log line {lineno}: unknown record kind {kind!r}")

    def _append(self, record: dict) -> None:
        if self._fh is not None:
            self._fh.write(json.dumps(record, ensure_ascii=False) + "\n")
            self._fh.flush()

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    # -- writes -----------------------------------------------------------

    def register_extraction(self, payload: dict) -> None:
        """Idempotent: re-registering the same id replaces the stored payload."""
        if "id" not in payload:
            raise ValueError("extraction payload has no id")
        if self._extractions.get(payload["id"]) == payload:
            return
        self._extractions[payload["id"]] = payload
        self._append({"kind": "extraction", "extraction": payload})

    def record_label(self, extraction_id: str, verdict: str, timestamp: float | None = None) -> UserLabel:
        if verdict not in VERDICTS:
            raise ValueError(f"verdict must be one of {VERDICTS}, got {verdict!r}")
        if extraction_id not in self._extractions:
            raise UnknownExtractionError(extraction_id)
        label = UserLabel(
            extraction_id=extraction_id,
            verdict=verdict,
            timestamp=time.time() if timestamp is None else timestamp,
        )
        self._labels[extraction_id] = label
        self._append(
            {
                "kind": "label",
                "extraction_id": label.extraction_id,
                "verdict": label.verdict,
                "timestamp": label.timestamp,
            }
        )
        return label

    def compact(self) -> None:
        """Rewrite the log with one record per current extraction and label."""
        if self.path is None:
            return
        self.close()
        with self.path.open("w", encoding="utf-8") as fh:
            for payload in self._extractions.values():
                fh.write(json.dumps({"kind": "extraction", "extraction": payload}, ensure_ascii=False) + "\n")
            for label in self._labels.values():
                fh.write(
                    json.dumps(
                        {
                            "kind": "label",
                            "extraction_id": label.extraction_id,
                            "verdict": label.verdict,
                            "timestamp": label.timestamp,
                        },
                        ensure_ascii=False,
                    )
                    + "\n"
                )
        self._fh = self.path.open("a", encoding="utf-8")

    # -- reads ------------------------------------------------------------

    def extraction(self, extraction_id: str) -> dict | None:
        return self._extractions.get(extraction_id)

    def labels(self) -> dict[str, UserLabel]:
        return dict(self._labels)

    def _rows(self) -> list[MetricsRow]:
        counters: dict[tuple[str, str], list[int]] = {}

        def bump(scope: str, name: str, slot: int) -> None:
            counters.setdefault((scope, name), [0, 0, 0])[slot] += 1

        for payload in self._extractions.values():
            task = payload.get("task", "?")
            label = payload.get("label", "?")
            template = payload.get("template_id") or "-"
            keys = (
                (SCOPE_TASK, task),
                (SCOPE_TYPE, f"{task}/{label}"),
                (SCOPE_TEMPLATE, f"{task}/{label}/{template}"),
            )
            verdict = self._labels.get(payload["id"])
            for key in keys:
                bump(*key, 0)
                if verdict is not None:
                    bump(*key, 1 if verdict.verdict == VERDICT_CORRECT else 2)

        rows = []
        for (scope, name), (total, correct, incorrect) in counters.items():
            labeled = correct + incorrect
            rows.append(
                MetricsRow(
                    scope=scope,
                    name=name,
                    total=total,
                    correct=correct,
                    incorrect=incorrect,
                    accuracy=correct / labeled if labeled else None,
                )
            )
        return rows

    def metrics(self, scope: str | None = None, sort: str = "name") -> list[MetricsRow]:
        """Metric rows, deterministically ordered by the sort key then name.

        Numeric sort keys order descending (rows without accuracy last); the
        name key orders ascending. ``scope=None`` returns all three scopes,
        task rows first.
        """
        if scope is not None and scope not in SCOPES:
            raise ValueError(f"scope must be one of {SCOPES}, got {scope!r}")
        if sort not in SORT_KEYS:
            raise ValueError(f"sort must be one of {SORT_KEYS}, got {sort!r}")
        rows = self._rows()
        if scope is not None:
            rows = [r for r in rows if r.scope == scope]

        scope_order = {s: i for i, s in enumerate(SCOPES)}
        if sort == "name":
            rows.sort(key=lambda r: (scope_order[r.scope], r.name))
        else:
            def numeric(r: MetricsRow) -> tuple:
                value = getattr(r, sort)
                missing = value is None
                return (scope_order[r.scope], missing, -(value or 0), r.name)

            rows.sort(key=numeric)
        return rows

    # -- dev set ------------------------------------------------------------

    def export_devset(self) -> bytes:
        """One JSON line per labeled extraction, payload embedded."""
        lines = []
        for extraction_id, label in self._labels.items():
            payload = self._extractions.get(extraction_id)
            lines.append(
                json.dumps(
                    {
                        "extraction": payload,
                        "verdict": label.verdict,
                        "timestamp": label.timestamp,
                    },
                    ensure_ascii=False,
                )
            )
        return ("\n".join(lines) + ("\n" if lines else "")).encode("utf-8")

    def import_devset(self, source: bytes | str, schema: Schema | None = None) -> list[str]:
        """Load an exported dev set; returns warnings (stale types are kept)."""
        text = source.decode("utf-8") if isinstance(source, bytes) else source
        known: set[str] | None = None
        if schema is not None:
            known = (
                {t.name for t in schema.entity_types}
                | {t.name for t in schema.relation_types}
                | {t.name for t in schema.event_types}
                | {t.name for t in schema.argument_roles}
            )
        warnings = []
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DevsetFormatError(f"dev set line {lineno}: {exc.msg}") from None
            payload = record.get("extraction")
            verdict = record.get("verdict")
            if not isinstance(payload, dict) or "id" not in payload or verdict not in VERDICTS:
                raise DevsetFormatError(f"dev set line {lineno}: bad record")
            if known is not None and payload.get("label") not in known:
                warnings.append(
                    f"line {lineno}: type {payload.get('label')!r} not in the current schema; kept as stale"
                )
            self.register_extraction(payload)
            self.record_label(payload["id"], verdict, timestamp=float(record.get("timestamp", 0.0)))
        return warnings
