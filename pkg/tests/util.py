"""Shared test helpers: independent brute-force oracles and random generators.

The oracles deliberately re-derive expected results by enumeration, not by
calling the code under test.
"""

from __future__ import annotations

import hashlib
import random

from entail_ie.backends import EntailmentScore, MockEntailmentBackend, OracleTable
from entail_ie.candidates import Span
from entail_ie.schema import (
    TRIGGER_MODE_SENTENCE,
    TRIGGER_MODE_SPAN,
    ArgumentRoleDef,
    EntityTypeDef,
    EventTypeDef,
    RelationTypeDef,
    Schema,
    Template,
)

NEGATIVE = "NEGATIVE"


# --- literal decision-rule oracles -------------------------------------------


def brute_force_single_label(items, threshold):
    """items: (type, template_id, score) in hypothesis order.

    Literal rule: pick the hypothesis with the highest entailment probability
    (first one wins ties); below the threshold, the negative class.
    Returns (label, score, template_id).
    """
    if not items:
        return (NEGATIVE, 0.0, None)
    best = items[0]
    for item in items[1:]:
        if item[2] > best[2]:
            best = item
    label = best[0] if best[2] >= threshold else NEGATIVE
    return (label, best[2], best[1])


def brute_force_multi_label(items, threshold):
    """Each type whose best hypothesis reaches the threshold, as {type: (score, template)}."""
    out = {}
    for type_name, template_id, score in items:
        if score >= threshold:
            cur = out.get(type_name)
            if cur is None or score > cur[0]:
                out[type_name] = (score, template_id)
    # score must be the type's max even if a lower template crossed first
    best = {}
    for type_name, template_id, score in items:
        cur = best.get(type_name)
        if cur is None or score > cur[0]:
            best[type_name] = (score, template_id)
    return {t: best[t] for t in out}


def brute_force_propn_runs(tags):
    """All maximal runs of consecutive PROPN tags, by exhaustive span checks."""
    n = len(tags)
    runs = []
    for i in range(n):
        for j in range(i + 1, n + 1):
            if all(t == "PROPN" for t in tags[i:j]):
                left_closed = i == 0 or tags[i - 1] != "PROPN"
                right_closed = j == n or tags[j] != "PROPN"
                if left_closed and right_closed:
                    runs.append((i, j))
    return sorted(set(runs))


def brute_force_relation_pairs(entities, schema):
    """All ordered constraint-satisfying pairs as (left, right, relation names)."""
    out = []
    for left_span, left_type in entities:
        for right_span, right_type in entities:
            if left_span == right_span or left_span.sentence_index != right_span.sentence_index:
                continue
            names = tuple(
                r.name for r in schema.relation_types if (left_type, right_type) in r.allowed_pairs
            )
            if names:
                out.append((left_span, right_span, names))
    return out


def brute_force_argument_pairs(event_type, sentence_index, entities, schema):
    out = []
    for span, etype in entities:
        if span.sentence_index != sentence_index:
            continue
        names = tuple(
            r.name
            for r in schema.argument_roles
            if r.owning_event == event_type and etype in r.allowed_filler_types
        )
        if names:
            out.append((span, names))
    return out


def brute_force_bio(tags):
    """Independent per-position BIO decoder: a span starts wherever a B-X sits,
    or an I-X not continued from the same label, and extends over I-X tags."""
    spans = []
    n = len(tags)
    for i, tag in enumerate(tags):
        if tag == "O":
            continue
        prefix, label = tag[0], tag[2:]
        starts = prefix == "B" or i == 0 or tags[i - 1] == "O" or tags[i - 1][2:] != label
        if prefix == "I" and not starts:
            continue
        j = i + 1
        while j < n and tags[j] == f"I-{label}":
            j += 1
        spans.append((i, j, label))
    return spans


# --- randomized inputs ---------------------------------------------------------


def random_span(rng: random.Random, sentence_index: int, salt: int) -> Span:
    start = rng.randrange(0, 40)
    end = start + rng.randrange(1, 8)
    return Span(
        sentence_index=sentence_index,
        char_start=start,
        char_end=end,
        text=f"w{salt}_{start}",
    )


def random_schema(rng: random.Random, max_types: int = 5) -> Schema:
    def templates(kind: str, type_index: int, body: str) -> tuple[Template, ...]:
        return tuple(
            Template(id=f"t{j}", text=body.format(j=j))
            for j in range(rng.randint(1, 3))
        )

    entity_types = tuple(
        EntityTypeDef(
            name=f"E{i}",
            templates=templates("e", i, "{{X}} is an e%d thing number {j}" % i),
        )
        for i in range(rng.randint(1, max_types))
    )
    names = [e.name for e in entity_types]
    relation_types = tuple(
        RelationTypeDef(
            name=f"R{i}",
            templates=templates("r", i, "{{X}} r%d links {j} to {{Y}}" % i),
            allowed_pairs=tuple(
                set((rng.choice(names), rng.choice(names)) for _ in range(rng.randint(1, 3)))
            ),
        )
        for i in range(rng.randint(0, max_types - 1))
    )
    event_types = []
    for i in range(rng.randint(0, max_types - 1)):
        mode = rng.choice([TRIGGER_MODE_SENTENCE, TRIGGER_MODE_SPAN])
        event_types.append(
            EventTypeDef(
                name=f"V{i}",
                trigger_mode=mode,
                templates=tuple(
                    Template(
                        id=f"t{j}",
                        text=(
                            f"something v{i} happened variant {j}"
                            if mode == TRIGGER_MODE_SENTENCE
                            else f"{{X}} marks v{i} variant {j}"
                        ),
                    )
                    for j in range(rng.randint(1, 2))
                ),
            )
        )
    event_types = tuple(event_types)
    argument_roles = tuple(
        ArgumentRoleDef(
            name=f"A{i}",
            owning_event=rng.choice([ev.name for ev in event_types]),
            templates=tuple(
                Template(
                    id=f"t{j}",
                    text=rng.choice(
                        [f"{{Y}} fills a{i} variant {j}", f"{{X}} gives a{i} to {{Y}} variant {j}"]
                    ),
                )
                for j in range(rng.randint(1, 2))
            ),
            allowed_filler_types=tuple(rng.sample(names, rng.randint(1, len(names)))),
        )
        for i in range(rng.randint(0, max_types - 1))
        if event_types
    )
    return Schema(
        entity_types=entity_types,
        relation_types=relation_types,
        event_types=event_types,
        argument_roles=argument_roles,
    )


def random_entities(rng: random.Random, schema: Schema, n_sentences: int = 2):
    names = [e.name for e in schema.entity_types]
    entities = []
    for salt in range(rng.randint(0, 8)):
        entities.append(
            (random_span(rng, rng.randrange(n_sentences), salt), rng.choice(names))
        )
    return entities


# --- backends -------------------------------------------------------------------


def table_backend(entries: dict[tuple[str, str], float]) -> MockEntailmentBackend:
    """Mock backend whose entailment probability per pair is given directly."""
    table = {
        key: EntailmentScore(entail=p, neutral=round(1.0 - p, 12), contradict=0.0)
        for key, p in entries.items()
    }
    return MockEntailmentBackend(OracleTable(entries=table))


class HashBackend:
    """Deterministic pseudo-random scores derived from the pair's content hash."""

    def entail_batch(self, premise, hypotheses):
        out = []
        for hyp in hypotheses:
            digest = hashlib.md5((premise + "\x1f" + hyp).encode("utf-8")).hexdigest()
            p = (int(digest[:8], 16) % 1001) / 1000.0
            out.append(EntailmentScore(entail=p, neutral=round(1.0 - p, 12), contradict=0.0))
        return out
