"""Candidate generation for the four extraction tasks.

NER candidates come from part-of-speech patterns over tagged tokens (default:
maximal runs of consecutive proper nouns). Event trigger candidates come from a
configurable trigger tag set, or a single sentence-level candidate. Relation
and argument candidates are ordered span pairs filtered by the schema's type
constraints; every constraint-satisfying pair is emitted and nothing else.

Pattern expressions are whitespace-separated items, each a tag or ``|``-joined
tag set with an optional ``+`` (one or more) or ``?`` (optional) suffix, e.g.
``"PROPN+"`` or ``"NOUN|ADJ? PROPN+"``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .preprocess import POS_TAGS, Sentence
from .schema import TRIGGER_MODE_SENTENCE, TRIGGER_MODE_SPAN, Schema

TASK_NER = "NER"
TASK_RE = "RE"
TASK_EE = "EE"
TASK_EAE = "EAE"

DEFAULT_NER_PATTERNS = ("PROPN+",)
DEFAULT_TRIGGER_TAGS = ("VERB",)


@dataclass(frozen=True)
class Span:
    sentence_index: int
    char_start: int
    char_end: int
    text: str

    def to_dict(self) -> dict:
        return {
            "sentence": self.sentence_index,
            "start": self.char_start,
            "end": self.char_end,
            "text": self.text,
        }


@dataclass(frozen=True)
class Candidate:
    """A span or ordered span pair proposed for typing.

    ``primary_span`` is None for sentence-level candidates. ``context`` holds
    the pair's types: (left, right) entity types for RE, (event type, filler
    entity type) for EAE. ``eligible_types`` are the relation or role names the
    pair may instantiate, as determined at generation time.
    """

    task: str
    sentence_index: int
    primary_span: Span | None = None
    secondary_span: Span | None = None
    context: tuple[str, str] | None = None
    eligible_types: tuple[str, ...] | None = None


class PatternError(ValueError):
    pass


@dataclass(frozen=True)
class PatternItem:
    tags: frozenset[str]
    repeat: str  # "", "+" or "?"


def parse_pattern(expr: str) -> tuple[PatternItem, ...]:
    items = []
    for raw in expr.split():
        repeat = ""
        if raw.endswith(("+", "?")):
            repeat = raw[-1]
            raw = raw[:-1]
        tags = frozenset(raw.split("|"))
        if not raw or not tags <= POS_TAGS:
            raise PatternError(f"unknown tag in pattern item {raw!r}")
        items.append(PatternItem(tags=tags, repeat=repeat))
    if not items:
        raise PatternError(f"empty pattern {expr!r}")
    return tuple(items)


def _match_ends(items: tuple[PatternItem, ...], tags: Sequence[str], item_i: int, pos: int) -> set[int]:
    """All token positions where the remaining pattern can end, starting at pos."""
    if item_i == len(items):
        return {pos}
    item = items[item_i]
    ends: set[int] = set()
    matches_here = pos < len(tags) and tags[pos] in item.tags
    if item.repeat == "?":
        ends |= _match_ends(items, tags, item_i + 1, pos)
        if matches_here:
            ends |= _match_ends(items, tags, item_i + 1, pos + 1)
    elif item.repeat == "+":
        j = pos
        while j < len(tags) and tags[j] in item.tags:
            j += 1
            ends |= _match_ends(items, tags, item_i + 1, j)
    else:
        if matches_here:
            ends |= _match_ends(items, tags, item_i + 1, pos + 1)
    return ends


def match_patterns(tags: Sequence[str], patterns: Sequence[tuple[PatternItem, ...]]) -> list[tuple[int, int]]:
    """Maximal token ranges matched by any pattern; no range contains another."""
    ranges: set[tuple[int, int]] = set()
    for pattern in patterns:
        for start in range(len(tags)):
            ends = _match_ends(pattern, tags, 0, start)
            ends.discard(start)  # zero-length matches are not spans
            if ends:
                ranges.add((start, max(ends)))
    maximal = [
        (s, e)
        for (s, e) in ranges
        if not any((s2 <= s and e <= e2) and (s2, e2) != (s, e) for (s2, e2) in ranges)
    ]
    return sorted(maximal)


def _span_for_range(sentence: Sentence, start_tok: int, end_tok: int) -> Span:
    cs = sentence.tokens[start_tok].char_start
    ce = sentence.tokens[end_tok - 1].char_end
    return Span(
        sentence_index=sentence.index,
        char_start=cs,
        char_end=ce,
        text=sentence.text[cs:ce],
    )


def ner_candidates(
    sentence: Sentence, patterns: Sequence[str] = DEFAULT_NER_PATTERNS
) -> list[Candidate]:
    compiled = [parse_pattern(p) for p in patterns]
    tags = [tok.pos or "OTHER" for tok in sentence.tokens]
    return [
        Candidate(
            task=TASK_NER,
            sentence_index=sentence.index,
            primary_span=_span_for_range(sentence, s, e),
        )
        for s, e in match_patterns(tags, compiled)
    ]


def trigger_candidates(
    sentence: Sentence,
    trigger_mode: str,
    trigger_tags: Sequence[str] = DEFAULT_TRIGGER_TAGS,
) -> list[Candidate]:
    if trigger_mode == TRIGGER_MODE_SENTENCE:
        return [Candidate(task=TASK_EE, sentence_index=sentence.index)]
    if trigger_mode != TRIGGER_MODE_SPAN:
        raise ValueError(f"unknown trigger mode {trigger_mode!r}")
    wanted = set(trigger_tags)
    out = []
    for i, tok in enumerate(sentence.tokens):
        if tok.pos in wanted:
            out.append(
                Candidate(
                    task=TASK_EE,
                    sentence_index=sentence.index,
                    primary_span=_span_for_range(sentence, i, i + 1),
                )
            )
    return out


def relation_pair_candidates(
    entities: Sequence[tuple[Span, str]], schema: Schema
) -> list[Candidate]:
    """Every ordered same-sentence pair of distinct spans satisfying some relation's
    allowed type pairs, annotated with the relation names it can instantiate."""
    out = []
    for left_span, left_type in entities:
        for right_span, right_type in entities:
            if left_span == right_span:
                continue
            if left_span.sentence_index != right_span.sentence_index:
                continue
            names = tuple(r.name for r in schema.relations_allowing((left_type, right_type)))
            if names:
                out.append(
                    Candidate(
                        task=TASK_RE,
                        sentence_index=left_span.sentence_index,
                        primary_span=left_span,
                        secondary_span=right_span,
                        context=(left_type, right_type),
                        eligible_types=names,
                    )
                )
    return out


def argument_candidates(
    event_type: str,
    trigger: Span | None,
    sentence_index: int,
    entities: Sequence[tuple[Span, str]],
    schema: Schema,
) -> list[Candidate]:
    """Every (event, same-sentence entity) pair where the entity's type fills some
    role of the event, annotated with those role names."""
    roles = schema.roles_for_event(event_type)
    out = []
    for span, etype in entities:
        if span.sentence_index != sentence_index:
            continue
        names = tuple(r.name for r in roles if etype in r.allowed_filler_types)
        if names:
            out.append(
                Candidate(
                    task=TASK_EAE,
                    sentence_index=sentence_index,
                    primary_span=trigger,
                    secondary_span=span,
                    context=(event_type, etype),
                    eligible_types=names,
                )
            )
    return out
