"""Extraction schema: type definitions, verbalization templates, validation, JSON I/O.

A schema declares entity types, relation types, event types and event argument
roles, each with one or more natural-language templates. Templates may contain
the placeholder tokens ``{X}`` and ``{Y}`` (at most once each, no escaping; any
other brace is rejected). Schema values are immutable snapshots; mutation means
building a new ``Schema`` with a higher ``version``.

File format (UTF-8 JSON, all keys part of the contract):

    {
      "entity_types":   [{"name": ..., "templates": [{"id": ..., "text": ...}, ...]}],
      "relation_types": [{"name": ..., "templates": [...], "allowed_pairs": [[left, right], ...]}],
      "event_types":    [{"name": ..., "templates": [...], "trigger_mode": "sentence-level"|"trigger-span"}],
      "argument_roles": [{"name": ..., "owning_event": ..., "templates": [...],
                          "allowed_filler_types": [...]}],
      "version": 1
    }

A template may be written as a bare string, in which case an id ``t<index>`` is
assigned; ``save_schema`` always writes the object form. The label ``NEGATIVE``
is reserved for the no-type decision and must not be used as a type name.
"""

from __future__ import annotations

import io
import json
import re
from dataclasses import dataclass, replace
from typing import Iterable, Union

PLACEHOLDER_X = "{X}"
PLACEHOLDER_Y = "{Y}"

TRIGGER_MODE_SENTENCE = "sentence-level"
TRIGGER_MODE_SPAN = "trigger-span"
TRIGGER_MODES = (TRIGGER_MODE_SENTENCE, TRIGGER_MODE_SPAN)

RESERVED_LABELS = frozenset({"NEGATIVE"})

_PLACEHOLDER_RE = re.compile(r"\{X\}|\{Y\}")


class SchemaParseError(ValueError):
    """Schema bytes are not valid JSON or not shaped like a schema file."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


@dataclass(frozen=True)
class Violation:
    """A single invariant violation, with a path to the offending element."""

    path: str
    message: str

    def to_dict(self) -> dict:
        return {"path": self.path, "message": self.message}


class SchemaValidationError(ValueError):
    """A schema failed validation; carries the full report."""

    def __init__(self, report: list[Violation]):
        self.report = report
        detail = "; ".join(f"{v.path}: {v.message}" for v in report)
        super().__init__(f"invalid schema: {detail}")


@dataclass(frozen=True)
class Template:
    id: str
    text: str

    @property
    def placeholders(self) -> tuple[str, ...]:
        """Placeholder names in order of appearance, e.g. ('X',) or ('X', 'Y')."""
        return tuple(m.group(0)[1:-1] for m in _PLACEHOLDER_RE.finditer(self.text))

    def has_slot(self, name: str) -> bool:
        return f"{{{name}}}" in self.text


@dataclass(frozen=True)
class EntityTypeDef:
    name: str
    templates: tuple[Template, ...]


@dataclass(frozen=True)
class RelationTypeDef:
    name: str
    templates: tuple[Template, ...]
    allowed_pairs: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class EventTypeDef:
    name: str
    templates: tuple[Template, ...]
    trigger_mode: str = TRIGGER_MODE_SENTENCE


@dataclass(frozen=True)
class ArgumentRoleDef:
    name: str
    owning_event: str
    templates: tuple[Template, ...]
    allowed_filler_types: tuple[str, ...]


@dataclass(frozen=True)
class Schema:
    """Immutable snapshot of the full extraction schema.

    Declaration order of every list is preserved; downstream tie-breaking
    depends on it.
    """

    entity_types: tuple[EntityTypeDef, ...] = ()
    relation_types: tuple[RelationTypeDef, ...] = ()
    event_types: tuple[EventTypeDef, ...] = ()
    argument_roles: tuple[ArgumentRoleDef, ...] = ()
    version: int = 1

    def entity_type_names(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.entity_types)

    def event_type(self, name: str) -> EventTypeDef | None:
        for et in self.event_types:
            if et.name == name:
                return et
        return None

    def roles_for_event(self, event_name: str) -> tuple[ArgumentRoleDef, ...]:
        return tuple(r for r in self.argument_roles if r.owning_event == event_name)

    def relations_allowing(self, pair: tuple[str, str]) -> tuple[RelationTypeDef, ...]:
        return tuple(r for r in self.relation_types if pair in r.allowed_pairs)

    def bumped(self) -> "Schema":
        return replace(self, version=self.version + 1)


# --- validation -------------------------------------------------------------

def _check_template_text(text: str, path: str, out: list[Violation]) -> None:
    stripped = _PLACEHOLDER_RE.sub("", text)
    if "{" in stripped or "}" in stripped:
        out.append(Violation(path, "literal braces are not allowed outside {X}/{Y}"))
    for ph in (PLACEHOLDER_X, PLACEHOLDER_Y):
        n = text.count(ph)
        if n > 1:
            out.append(Violation(path, f"placeholder {ph} appears {n} times; at most once"))


def _check_templates(
    templates: tuple[Template, ...],
    path: str,
    out: list[Violation],
    *,
    require: tuple[str, ...] = (),
    forbid: tuple[str, ...] = (),
) -> None:
    if not templates:
        out.append(Violation(path, "templates must be non-empty"))
    seen_ids: set[str] = set()
    for i, tpl in enumerate(templates):
        tpath = f"{path}.templates[{i}]"
        if tpl.id in seen_ids:
            out.append(Violation(tpath, f"duplicate template id {tpl.id!r}"))
        seen_ids.add(tpl.id)
        _check_template_text(tpl.text, tpath, out)
        for name in require:
            if tpl.text.count(f"{{{name}}}") != 1:
                out.append(Violation(tpath, f"template must use {{{name}}} exactly once"))
        for name in forbid:
            if f"{{{name}}}" in tpl.text:
                out.append(Violation(tpath, f"template must not use {{{name}}}"))


def validate_schema(schema: Schema) -> list[Violation]:
    """Return every invariant violation; an empty report means the schema is valid."""
    out: list[Violation] = []
    entity_names = set()
    for i, et in enumerate(schema.entity_types):
        path = f"entity_types[{i}]"
        if et.name in entity_names:
            out.append(Violation(path, f"duplicate entity type name {et.name!r}"))
        entity_names.add(et.name)
        if et.name in RESERVED_LABELS:
            out.append(Violation(path, f"type name {et.name!r} is reserved"))
        _check_templates(et.templates, path, out, require=("X",), forbid=("Y",))

    declared_entities = {et.name for et in schema.entity_types}

    rel_names = set()
    for i, rt in enumerate(schema.relation_types):
        path = f"relation_types[{i}]"
        if rt.name in rel_names:
            out.append(Violation(path, f"duplicate relation type name {rt.name!r}"))
        rel_names.add(rt.name)
        if rt.name in RESERVED_LABELS:
            out.append(Violation(path, f"type name {rt.name!r} is reserved"))
        _check_templates(rt.templates, path, out, require=("X", "Y"))
        if not rt.allowed_pairs:
            out.append(Violation(f"{path}.allowed_pairs", "allowed_pairs must be non-empty"))
        for j, (left, right) in enumerate(rt.allowed_pairs):
            for side in (left, right):
                if side not in declared_entities:
                    out.append(
                        Violation(
                            f"{path}.allowed_pairs[{j}]",
                            f"unresolved entity type {side}",
                        )
                    )

    event_names = set()
    for i, ev in enumerate(schema.event_types):
        path = f"event_types[{i}]"
        if ev.name in event_names:
            out.append(Violation(path, f"duplicate event type name {ev.name!r}"))
        event_names.add(ev.name)
        if ev.name in RESERVED_LABELS:
            out.append(Violation(path, f"type name {ev.name!r} is reserved"))
        if ev.trigger_mode not in TRIGGER_MODES:
            out.append(Violation(path, f"unknown trigger_mode {ev.trigger_mode!r}"))
        if ev.trigger_mode == TRIGGER_MODE_SPAN:
            _check_templates(ev.templates, path, out, require=("X",), forbid=("Y",))
        else:
            # Sentence-level hypotheses have no span to bind: templates are slotless.
            _check_templates(ev.templates, path, out, forbid=("X", "Y"))

    declared_events = {ev.name for ev in schema.event_types}

    role_keys = set()
    for i, role in enumerate(schema.argument_roles):
        path = f"argument_roles[{i}]"
        key = (role.owning_event, role.name)
        if key in role_keys:
            out.append(
                Violation(path, f"duplicate role {role.name!r} for event {role.owning_event!r}")
            )
        role_keys.add(key)
        if role.name in RESERVED_LABELS:
            out.append(Violation(path, f"type name {role.name!r} is reserved"))
        if role.owning_event not in declared_events:
            out.append(Violation(path, f"unresolved event type {role.owning_event}"))
        _check_templates(role.templates, path, out, require=("Y",))
        if not role.allowed_filler_types:
            out.append(
                Violation(f"{path}.allowed_filler_types", "allowed_filler_types must be non-empty")
            )
        for j, filler in enumerate(role.allowed_filler_types):
            if filler not in declared_entities:
                out.append(
                    Violation(
                        f"{path}.allowed_filler_types[{j}]",
                        f"unresolved entity type {filler}",
                    )
                )

    if not isinstance(schema.version, int) or schema.version < 1:
        out.append(Violation("version", "version must be a positive integer"))
    return out


# --- JSON I/O ---------------------------------------------------------------

Source = Union[bytes, str, "io.IOBase"]


def _read_source(source: Source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def _parse_templates(raw: object, path: str) -> tuple[Template, ...]:
    if not isinstance(raw, list):
        raise SchemaParseError(f"{path}.templates must be a list")
    templates = []
    for i, item in enumerate(raw):
        if isinstance(item, str):
            templates.append(Template(id=f"t{i}", text=item))
        elif isinstance(item, dict):
            try:
                templates.append(Template(id=str(item["id"]), text=str(item["text"])))
            except KeyError as exc:
                raise SchemaParseError(
                    f"{path}.templates[{i}] missing key {exc.args[0]!r}"
                ) from None
        else:
            raise SchemaParseError(f"{path}.templates[{i}] must be a string or object")
    return tuple(templates)


def _expect_list(data: dict, key: str) -> list:
    raw = data.get(key, [])
    if not isinstance(raw, list):
        raise SchemaParseError(f"top-level {key!r} must be a list")
    return raw


def schema_from_dict(data: dict) -> Schema:
    """Build a Schema from parsed JSON; structural problems raise SchemaParseError."""
    if not isinstance(data, dict):
        raise SchemaParseError("schema file must contain a JSON object")
    entity_types = []
    for i, raw in enumerate(_expect_list(data, "entity_types")):
        path = f"entity_types[{i}]"
        if not isinstance(raw, dict) or "name" not in raw:
            raise SchemaParseError(f"{path} must be an object with a name")
        entity_types.append(
            EntityTypeDef(name=str(raw["name"]), templates=_parse_templates(raw.get("templates", []), path))
        )
    relation_types = []
    for i, raw in enumerate(_expect_list(data, "relation_types")):
        path = f"relation_types[{i}]"
        if not isinstance(raw, dict) or "name" not in raw:
            raise SchemaParseError(f"{path} must be an object with a name")
        pairs_raw = raw.get("allowed_pairs", [])
        if not isinstance(pairs_raw, list):
            raise SchemaParseError(f"{path}.allowed_pairs must be a list")
        pairs = []
        for j, pair in enumerate(pairs_raw):
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise SchemaParseError(f"{path}.allowed_pairs[{j}] must be a [left, right] pair")
            pairs.append((str(pair[0]), str(pair[1])))
        relation_types.append(
            RelationTypeDef(
                name=str(raw["name"]),
                templates=_parse_templates(raw.get("templates", []), path),
                allowed_pairs=tuple(pairs),
            )
        )
    event_types = []
    for i, raw in enumerate(_expect_list(data, "event_types")):
        path = f"event_types[{i}]"
        if not isinstance(raw, dict) or "name" not in raw:
            raise SchemaParseError(f"{path} must be an object with a name")
        event_types.append(
            EventTypeDef(
                name=str(raw["name"]),
                templates=_parse_templates(raw.get("templates", []), path),
                trigger_mode=str(raw.get("trigger_mode", TRIGGER_MODE_SENTENCE)),
            )
        )
    argument_roles = []
    for i, raw in enumerate(_expect_list(data, "argument_roles")):
        path = f"argument_roles[{i}]"
        if not isinstance(raw, dict) or "name" not in raw or "owning_event" not in raw:
            raise SchemaParseError(f"{path} must be an object with name and owning_event")
        fillers = raw.get("allowed_filler_types", [])
        if not isinstance(fillers, list):
            raise SchemaParseError(f"{path}.allowed_filler_types must be a list")
        argument_roles.append(
            ArgumentRoleDef(
                name=str(raw["name"]),
                owning_event=str(raw["owning_event"]),
                templates=_parse_templates(raw.get("templates", []), path),
                allowed_filler_types=tuple(str(f) for f in fillers),
            )
        )
    version = data.get("version", 1)
    if not isinstance(version, int):
        raise SchemaParseError("version must be an integer")
    return Schema(
        entity_types=tuple(entity_types),
        relation_types=tuple(relation_types),
        event_types=tuple(event_types),
        argument_roles=tuple(argument_roles),
        version=version,
    )


def load_schema(source: Source) -> Schema:
    """Parse and validate a schema file; the result always passes validate_schema."""
    text = _read_source(source)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaParseError(exc.msg, line=exc.lineno, column=exc.colno) from None
    schema = schema_from_dict(data)
    report = validate_schema(schema)
    if report:
        raise SchemaValidationError(report)
    return schema


def schema_to_dict(schema: Schema) -> dict:
    def tpls(templates: Iterable[Template]) -> list[dict]:
        return [{"id": t.id, "text": t.text} for t in templates]

    return {
        "entity_types": [
            {"name": et.name, "templates": tpls(et.templates)} for et in schema.entity_types
        ],
        "relation_types": [
            {
                "name": rt.name,
                "templates": tpls(rt.templates),
                "allowed_pairs": [list(p) for p in rt.allowed_pairs],
            }
            for rt in schema.relation_types
        ],
        "event_types": [
            {"name": ev.name, "templates": tpls(ev.templates), "trigger_mode": ev.trigger_mode}
            for ev in schema.event_types
        ],
        "argument_roles": [
            {
                "name": role.name,
                "owning_event": role.owning_event,
                "templates": tpls(role.templates),
                "allowed_filler_types": list(role.allowed_filler_types),
            }
            for role in schema.argument_roles
        ],
        "version": schema.version,
    }


def save_schema(schema: Schema) -> bytes:
    """Serialize to canonical UTF-8 JSON; load_schema(save_schema(s)) == s."""
    return (json.dumps(schema_to_dict(schema), indent=2, ensure_ascii=False) + "\n").encode("utf-8")
