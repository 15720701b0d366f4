"""Template instantiation: turn (candidate, template) pairs into hypotheses.

Placeholders are replaced with the exact surface text of the corresponding
span in a single pass: ``{X}`` binds the primary span (entity mention, trigger),
``{Y}`` the secondary span (right entity, argument filler). Slotless templates
pass through verbatim. Templates should read as well-formed sentences; the text
is never adjusted for case, articles or punctuation.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

from .candidates import TASK_EAE, TASK_EE, TASK_NER, TASK_RE, Candidate
from .schema import TRIGGER_MODE_SENTENCE, Schema, Template

logger = logging.getLogger(__name__)

_SLOT_RE = re.compile(r"\{X\}|\{Y\}")


class VerbalizationError(ValueError):
    """Template slot arity does not match the candidate's span shape."""

    def __init__(self, template: Template, candidate: Candidate, missing: str):
        self.template = template
        self.candidate = candidate
        super().__init__(
            f"template {template.id!r} ({template.text!r}) needs {missing} "
            f"but the {candidate.task} candidate does not provide it"
        )


@dataclass(frozen=True)
class Hypothesis:
    text: str
    label: str
    template_id: str
    candidate: Candidate


def instantiate(template: Template, candidate: Candidate) -> str:
    """Fill the template's slots from the candidate's spans."""
    bindings = {}
    if template.has_slot("X"):
        if candidate.primary_span is None:
            raise VerbalizationError(template, candidate, "{X}")
        bindings["{X}"] = candidate.primary_span.text
    if template.has_slot("Y"):
        if candidate.secondary_span is None:
            raise VerbalizationError(template, candidate, "{Y}")
        bindings["{Y}"] = candidate.secondary_span.text
    if not bindings:
        return template.text
    return _SLOT_RE.sub(lambda m: bindings[m.group(0)], template.text)


def _eligible(candidate: Candidate, name: str) -> bool:
    return candidate.eligible_types is None or name in candidate.eligible_types


def hypotheses_for(candidate: Candidate, schema: Schema) -> list[Hypothesis]:
    """One hypothesis per (eligible type, template), in schema declaration order.

    RE and EAE hypotheses are produced only for types whose constraints the
    candidate satisfies. Argument templates with a trigger slot are skipped
    (with a logged warning) when the owning event is sentence-level, because no
    trigger text exists to bind.
    """
    out: list[Hypothesis] = []

    def emit(label: str, template: Template) -> None:
        out.append(
            Hypothesis(
                text=instantiate(template, candidate),
                label=label,
                template_id=template.id,
                candidate=candidate,
            )
        )

    if candidate.task == TASK_NER:
        for et in schema.entity_types:
            for tpl in et.templates:
                emit(et.name, tpl)
    elif candidate.task == TASK_EE:
        sentence_level = candidate.primary_span is None
        for ev in schema.event_types:
            if (ev.trigger_mode == TRIGGER_MODE_SENTENCE) != sentence_level:
                continue
            for tpl in ev.templates:
                emit(ev.name, tpl)
    elif candidate.task == TASK_RE:
        if candidate.context is None:
            raise ValueError("relation candidate is missing its (left, right) types")
        for rel in schema.relation_types:
            if candidate.context not in rel.allowed_pairs or not _eligible(candidate, rel.name):
                continue
            for tpl in rel.templates:
                emit(rel.name, tpl)
    elif candidate.task == TASK_EAE:
        if candidate.context is None:
            raise ValueError("argument candidate is missing its (event, filler) types")
        event_type, filler_type = candidate.context
        for role in schema.argument_roles:
            if role.owning_event != event_type or filler_type not in role.allowed_filler_types:
                continue
            if not _eligible(candidate, role.name):
                continue
            for tpl in role.templates:
                if tpl.has_slot("X") and candidate.primary_span is None:
                    logger.warning(
                        "skipping trigger-slot template %s for role %s: "
                        "event %s has no trigger span",
                        tpl.id,
                        role.name,
                        event_type,
                    )
                    continue
                emit(role.name, tpl)
    else:
        raise ValueError(f"unknown task {candidate.task!r}")
    return out
