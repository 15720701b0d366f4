/**
 * Client-side template and type validation.
 *
 * Mirrors the server's schema rules so mistakes surface inline, before a PUT:
 * placeholders appear at most once, no literal braces, and slot arity matches
 * the kind of type that owns the template. The server remains the authority;
 * these checks only shorten the feedback loop.
 */

import type { SchemaFile, TriggerMode } from './types';

export type TypeKind = 'entity' | 'relation' | 'event' | 'argument';

function count(text: string, needle: string): number {
  return text.split(needle).length - 1;
}

/** Null when valid, else a human-readable problem. */
export function validateTemplateText(
  text: string,
  kind: TypeKind,
  triggerMode: TriggerMode = 'sentence-level',
): string | null {
  if (!text.trim()) return 'template text is empty';
  const x = count(text, '{X}');
  const y = count(text, '{Y}');
  const residue = text.replaceAll('{X}', '').replaceAll('{Y}', '');
  if (residue.includes('{') || residue.includes('}')) {
    return 'only the placeholders {X} and {Y} may use braces';
  }
  if (x > 1) return '{X} may appear at most once';
  if (y > 1) return '{Y} may appear at most once';
  switch (kind) {
    case 'entity':
      if (x !== 1) return 'an entity template must mention the span: use {X} exactly once';
      if (y > 0) return 'entity templates cannot use {Y}';
      return null;
    case 'relation':
      if (x !== 1 || y !== 1) return 'a relation template needs both {X} and {Y}';
      return null;
    case 'event':
      if (triggerMode === 'trigger-span') {
        if (x !== 1) return 'a trigger-span event template needs {X} for the trigger';
        if (y > 0) return 'event templates cannot use {Y}';
      } else if (x > 0 || y > 0) {
        return 'sentence-level event templates take no placeholders';
      }
      return null;
    case 'argument':
      if (y !== 1) return 'an argument template must mention the filler: use {Y} exactly once';
      return null;
  }
}

export function validateTypeName(name: string, existing: string[]): string | null {
  if (!name.trim()) return 'name is empty';
  if (name === 'NEGATIVE') return 'NEGATIVE is reserved for the no-type decision';
  if (existing.includes(name)) return `a type named ${name} already exists`;
  return null;
}

/** Names an obvious draft problem before a save attempt, or null. */
export function validateDraft(draft: SchemaFile): string | null {
  for (const et of draft.entity_types) {
    for (const tpl of et.templates) {
      const problem = validateTemplateText(tpl.text, 'entity');
      if (problem) return `${et.name}/${tpl.id}: ${problem}`;
    }
    if (!et.templates.length) return `${et.name}: at least one template required`;
  }
  for (const rt of draft.relation_types) {
    for (const tpl of rt.templates) {
      const problem = validateTemplateText(tpl.text, 'relation');
      if (problem) return `${rt.name}/${tpl.id}: ${problem}`;
    }
    if (!rt.allowed_pairs.length) return `${rt.name}: at least one allowed type pair required`;
    const known = draft.entity_types.map((e) => e.name);
    for (const [left, right] of rt.allowed_pairs) {
      if (!known.includes(left)) return `${rt.name}: unknown left entity type ${left}`;
      if (!known.includes(right)) return `${rt.name}: unknown right entity type ${right}`;
    }
  }
  for (const ev of draft.event_types) {
    for (const tpl of ev.templates) {
      const problem = validateTemplateText(tpl.text, 'event', ev.trigger_mode);
      if (problem) return `${ev.name}/${tpl.id}: ${problem}`;
    }
  }
  for (const role of draft.argument_roles) {
    for (const tpl of role.templates) {
      const problem = validateTemplateText(tpl.text, 'argument');
      if (problem) return `${role.name}/${tpl.id}: ${problem}`;
    }
    if (!draft.event_types.some((ev) => ev.name === role.owning_event)) {
      return `${role.name}: unknown owning event ${role.owning_event}`;
    }
    if (!role.allowed_filler_types.length) {
      return `${role.name}: at least one allowed filler type required`;
    }
  }
  return null;
}
