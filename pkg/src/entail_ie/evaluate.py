"""Batch evaluation against gold corpora, and dev-set threshold tuning.

Scoring is micro precision / recall / F1 over exact matches:

* NER: (sentence, char span, type);
* relations: (sentence, left span, right span, direction, relation label);
* events: sentence-level (sentence, event type) pairs; trigger words are not
  scored;
* arguments: (sentence, event type, filler span, role).

Precision with zero predictions is defined as 0 so aggregation stays total.
CoNLL 2003 input is adapted by relabeling every MISC span to O before decoding.

Gold corpus JSON format (also accepted for predictions):

    {"documents": [{
        "doc_id": ...,
        "sentences": [str, ...],
        "entities":  [{"sentence", "start", "end", "type"}, ...],
        "relations": [{"sentence", "left_start", "left_end",
                       "right_start", "right_end", "type"}, ...],
        "events":    [{"sentence", "type"}, ...],
        "arguments": [{"sentence", "event_type", "start", "end", "role"}, ...]
    }, ...]}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .candidates import TASK_EAE, TASK_EE, TASK_NER, TASK_RE

Key = tuple  # (doc_id, ..., label); the predicted label is always last


class CorpusFormatError(ValueError):
    pass


class DocumentMismatchError(ValueError):
    pass


@dataclass(frozen=True)
class GoldDocument:
    doc_id: str
    sentences: tuple[str, ...]
    entities: tuple[tuple[int, int, int, str], ...] = ()  # (sent, start, end, type)
    relations: tuple[tuple[int, int, int, int, int, str], ...] = ()
    events: tuple[tuple[int, str], ...] = ()
    arguments: tuple[tuple[int, str, int, int, str], ...] = ()  # (sent, event, start, end, role)


@dataclass(frozen=True)
class GoldCorpus:
    documents: tuple[GoldDocument, ...] = ()

    def doc_ids(self) -> tuple[str, ...]:
        return tuple(d.doc_id for d in self.documents)


@dataclass(frozen=True)
class TypeScores:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
        }


@dataclass(frozen=True)
class ScoreReport:
    task: str
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int
    per_type: dict[str, TypeScores] = field(default_factory=dict)
    threshold: float | None = None

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "threshold": self.threshold,
            "per_type": {name: ts.to_dict() for name, ts in sorted(self.per_type.items())},
        }

    def to_text(self) -> str:
        width = max([len("micro")] + [len(name) for name in self.per_type])
        header = f"{'':<{width}}  {'P':>7} {'R':>7} {'F1':>7} {'TP':>5} {'FP':>5} {'FN':>5}"
        lines = [f"task: {self.task}" + (f"  (threshold={self.threshold})" if self.threshold is not None else ""), header, "-" * len(header)]
        for name, ts in sorted(self.per_type.items()):
            lines.append(
                f"{name:<{width}}  {ts.precision:>7.4f} {ts.recall:>7.4f} {ts.f1:>7.4f} "
                f"{ts.tp:>5} {ts.fp:>5} {ts.fn:>5}"
            )
        lines.append(
            f"{'micro':<{width}}  {self.precision:>7.4f} {self.recall:>7.4f} {self.f1:>7.4f} "
            f"{self.tp:>5} {self.fp:>5} {self.fn:>5}"
        )
        return "\n".join(lines)


# --- CoNLL loading -----------------------------------------------------------


def decode_bio(tags: Sequence[str]) -> list[tuple[int, int, str]]:
    """BIO tags to (start, end, label) token spans, end exclusive.

    An I- tag opening a new label (after O, at position 0, or after a
    different label) starts a span, the standard repair.
    """
    spans = []
    start = None
    current = None

    def close(end: int) -> None:
        nonlocal start, current
        if start is not None:
            spans.append((start, end, current))
        start, current = None, None

    for i, tag in enumerate(tags):
        if tag == "O":
            close(i)
            continue
        if len(tag) < 3 or tag[1] != "-" or tag[0] not in "BI":
            raise CorpusFormatError(f"bad BIO tag {tag!r} at position {i}")
        prefix, label = tag[0], tag[2:]
        if prefix == "B" or current != label:
            close(i)
            start, current = i, label
    close(len(tags))
    return spans


def load_conll(source: bytes | str, misc_label: str = "MISC") -> GoldCorpus:
    """Parse CoNLL 2003 4-column data; MISC spans are relabeled to O first."""
    text = source.decode("utf-8") if isinstance(source, bytes) else source
    documents: list[GoldDocument] = []
    sentences: list[str] = []
    entities: list[tuple[int, int, int, str]] = []
    tokens: list[str] = []
    tags: list[str] = []

    def flush_sentence(lineno: int) -> None:
        nonlocal tokens, tags
        if not tokens:
            return
        offsets = []
        pos = 0
        for tok in tokens:
            offsets.append((pos, pos + len(tok)))
            pos += len(tok) + 1
        sent_text = " ".join(tokens)
        sent_index = len(sentences)
        sentences.append(sent_text)
        try:
            spans = decode_bio(tags)
        except CorpusFormatError as exc:
            raise CorpusFormatError(f"near line {lineno}: {exc}") from None
        for tok_start, tok_end, label in spans:
            entities.append((sent_index, offsets[tok_start][0], offsets[tok_end - 1][1], label))
        tokens, tags = [], []

    def flush_document() -> None:
        nonlocal sentences, entities
        if not sentences:
            return
        documents.append(
            GoldDocument(
                doc_id=f"doc{len(documents)}",
                sentences=tuple(sentences),
                entities=tuple(entities),
            )
        )
        sentences, entities = [], []

    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped:
            flush_sentence(lineno)
            continue
        if stripped.startswith("-DOCSTART-"):
            flush_sentence(lineno)
            flush_document()
            continue
        columns = stripped.split()
        if len(columns) != 4:
            raise CorpusFormatError(f"line {lineno}: expected 4 columns, got {len(columns)}")
        token, tag = columns[0], columns[3]
        if tag != "O" and (len(tag) < 3 or tag[1] != "-"):
            raise CorpusFormatError(f"line {lineno}: bad NER tag {tag!r}")
        if tag != "O" and tag[2:] == misc_label:
            tag = "O"
        tokens.append(token)
        tags.append(tag)
    flush_sentence(len(text.splitlines()))
    flush_document()
    return GoldCorpus(documents=tuple(documents))


# --- corpus JSON -------------------------------------------------------------


def load_corpus_json(source: bytes | str) -> GoldCorpus:
    text = source.decode("utf-8") if isinstance(source, bytes) else source
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorpusFormatError(f"corpus is not valid JSON: {exc.msg} (line {exc.lineno})") from None
    if not isinstance(data, dict) or not isinstance(data.get("documents"), list):
        raise CorpusFormatError("corpus must be an object with a 'documents' list")
    documents = []
    for i, raw in enumerate(data["documents"]):
        if not isinstance(raw, dict):
            raise CorpusFormatError(f"documents[{i}] must be an object")
        try:
            doc_id = str(raw.get("doc_id", f"doc{i}"))
            sentences = tuple(str(s) for s in raw.get("sentences", []))
            entities = tuple(
                (int(e["sentence"]), int(e["start"]), int(e["end"]), str(e["type"]))
                for e in raw.get("entities", [])
            )
            relations = tuple(
                (
                    int(r["sentence"]),
                    int(r["left_start"]),
                    int(r["left_end"]),
                    int(r["right_start"]),
                    int(r["right_end"]),
                    str(r["type"]),
                )
                for r in raw.get("relations", [])
            )
            events = tuple((int(e["sentence"]), str(e["type"])) for e in raw.get("events", []))
            arguments = tuple(
                (
                    int(a["sentence"]),
                    str(a["event_type"]),
                    int(a["start"]),
                    int(a["end"]),
                    str(a["role"]),
                )
                for a in raw.get("arguments", [])
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CorpusFormatError(f"documents[{i}]: {exc}") from None
        for sent, start, end, _ in entities:
            if not (0 <= sent < len(sentences)) or not (0 <= start < end <= len(sentences[sent])):
                raise CorpusFormatError(f"documents[{i}]: entity span out of range")
        documents.append(
            GoldDocument(
                doc_id=doc_id,
                sentences=sentences,
                entities=entities,
                relations=relations,
                events=events,
                arguments=arguments,
            )
        )
    return GoldCorpus(documents=tuple(documents))


def document_keys(doc: GoldDocument, task: str) -> set[Key]:
    if task == TASK_NER:
        return {(doc.doc_id, s, a, b, t) for (s, a, b, t) in doc.entities}
    if task == TASK_RE:
        return {(doc.doc_id, s, la, lb, ra, rb, t) for (s, la, lb, ra, rb, t) in doc.relations}
    if task == TASK_EE:
        return {(doc.doc_id, s, t) for (s, t) in doc.events}
    if task == TASK_EAE:
        return {(doc.doc_id, s, ev, a, b, role) for (s, ev, a, b, role) in doc.arguments}
    raise ValueError(f"unknown task {task!r}")


def corpus_keys(corpus: GoldCorpus, task: str) -> set[Key]:
    keys: set[Key] = set()
    for doc in corpus.documents:
        keys |= document_keys(doc, task)
    return keys


def annotation_items(doc_id: str, annotations: dict, task: str) -> list[tuple[Key, float]]:
    """(key, score) pairs for one document's annotations JSON (pipeline output)."""

    def span(e: dict, which: str) -> tuple[int, int]:
        s = e.get(which)
        if not isinstance(s, dict):
            raise CorpusFormatError(f"extraction {e.get('id')!r} has no {which}")
        return int(s["start"]), int(s["end"])

    items: list[tuple[Key, float]] = []
    if task == TASK_NER:
        for e in annotations.get("entities", []):
            a, b = span(e, "span")
            items.append(((doc_id, int(e["sentence"]), a, b, str(e["label"])), float(e["score"])))
    elif task == TASK_RE:
        for e in annotations.get("relations", []):
            la, lb = span(e, "span")
            ra, rb = span(e, "secondary_span")
            items.append(
                ((doc_id, int(e["sentence"]), la, lb, ra, rb, str(e["label"])), float(e["score"]))
            )
    elif task == TASK_EE:
        for e in annotations.get("events", []):
            items.append(((doc_id, int(e["sentence"]), str(e["label"])), float(e["score"])))
    elif task == TASK_EAE:
        for e in annotations.get("arguments", []):
            a, b = span(e, "secondary_span")
            event_type = (e.get("context") or [None])[0]
            items.append(
                ((doc_id, int(e["sentence"]), str(event_type), a, b, str(e["label"])), float(e["score"]))
            )
    else:
        raise ValueError(f"unknown task {task!r}")
    return items


def load_scored_items(source: bytes | str, task: str) -> list[tuple[Key, float]]:
    """Corpus-JSON predictions whose records carry a raw ``score`` (default 1.0)."""
    text = source.decode("utf-8") if isinstance(source, bytes) else source
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorpusFormatError(f"predictions are not valid JSON: {exc.msg} (line {exc.lineno})") from None
    if not isinstance(data, dict) or not isinstance(data.get("documents"), list):
        raise CorpusFormatError("predictions must be an object with a 'documents' list")
    field_for = {TASK_NER: "entities", TASK_RE: "relations", TASK_EE: "events", TASK_EAE: "arguments"}
    if task not in field_for:
        raise ValueError(f"unknown task {task!r}")
    items: list[tuple[Key, float]] = []
    for i, raw in enumerate(data["documents"]):
        doc_id = str(raw.get("doc_id", f"doc{i}"))
        for record in raw.get(field_for[task], []):
            try:
                score = float(record.get("score", 1.0))
                if task == TASK_NER:
                    key: Key = (doc_id, int(record["sentence"]), int(record["start"]),
                                int(record["end"]), str(record["type"]))
                elif task == TASK_RE:
                    key = (doc_id, int(record["sentence"]), int(record["left_start"]),
                           int(record["left_end"]), int(record["right_start"]),
                           int(record["right_end"]), str(record["type"]))
                elif task == TASK_EE:
                    key = (doc_id, int(record["sentence"]), str(record["type"]))
                else:
                    key = (doc_id, int(record["sentence"]), str(record["event_type"]),
                           int(record["start"]), int(record["end"]), str(record["role"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise CorpusFormatError(f"documents[{i}]: {exc}") from None
            items.append((key, score))
    return items


# --- scoring -----------------------------------------------------------------


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    precision = tp / (tp + fp) if (tp + fp) else 0.0
    recall = tp / (tp + fn) if (tp + fn) else 0.0
    f1 = 2 * precision * recall / (precision + recall) if (precision + recall) else 0.0
    return precision, recall, f1


def score_keys(
    predicted: Iterable[Key], gold: Iterable[Key], task: str, threshold: float | None = None
) -> ScoreReport:
    pred_set, gold_set = set(predicted), set(gold)
    tp = len(pred_set & gold_set)
    fp = len(pred_set - gold_set)
    fn = len(gold_set - pred_set)
    precision, recall, f1 = _prf(tp, fp, fn)

    per_type: dict[str, TypeScores] = {}
    labels = {k[-1] for k in pred_set | gold_set}
    for label in labels:
        p_l = {k for k in pred_set if k[-1] == label}
        g_l = {k for k in gold_set if k[-1] == label}
        ltp = len(p_l & g_l)
        lfp = len(p_l - g_l)
        lfn = len(g_l - p_l)
        lp, lr, lf = _prf(ltp, lfp, lfn)
        per_type[label] = TypeScores(precision=lp, recall=lr, f1=lf, tp=ltp, fp=lfp, fn=lfn)

    return ScoreReport(
        task=task,
        precision=precision,
        recall=recall,
        f1=f1,
        tp=tp,
        fp=fp,
        fn=fn,
        per_type=per_type,
        threshold=threshold,
    )


def score_task(predictions: GoldCorpus, gold: GoldCorpus, task: str) -> ScoreReport:
    """Micro-averaged exact-match scores; the corpora must cover the same documents."""
    if set(predictions.doc_ids()) != set(gold.doc_ids()):
        raise DocumentMismatchError(
            f"prediction documents {sorted(predictions.doc_ids())} != gold {sorted(gold.doc_ids())}"
        )
    return score_keys(corpus_keys(predictions, task), corpus_keys(gold, task), task)


# --- threshold tuning ---------------------------------------------------------


def threshold_grid(step: float = 0.01) -> list[float]:
    n = int(round(1.0 / step))
    return [round(i * step, 10) for i in range(n + 1)]


def tune_threshold(
    predictions: Sequence[tuple[Key, float]],
    gold: Iterable[Key],
    task: str,
    step: float = 0.01,
) -> tuple[float, ScoreReport]:
    """Exhaustive grid search over [0, 1]; ties resolve to the largest threshold.

    Predictions carry raw entailment scores so the positive set can be
    recomputed at every candidate threshold.
    """
    if not predictions:
        raise ValueError("empty dev set: nothing to tune on")
    gold_set = set(gold)
    best_t = 0.0
    best_report: ScoreReport | None = None
    for t in threshold_grid(step):
        kept = [key for key, score in predictions if score >= t]
        report = score_keys(kept, gold_set, task, threshold=t)
        if best_report is None or report.f1 >= best_report.f1:
            best_t, best_report = t, report
    assert best_report is not None
    return best_t, best_report
