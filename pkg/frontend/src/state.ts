/**
 * View state and its pure transitions.
 *
 * The UI never computes extraction decisions or metric values itself; state
 * holds served payloads plus the editable schema draft, a dirty marker while
 * the draft diverges from the saved server version, and the optimistic label
 * overlay that reconciles with server acknowledgments.
 */

import type {
  AnnotationsResponse,
  MetricsRow,
  SchemaFile,
  TaskName,
  TriggerMode,
  Verdict,
} from './types';
import { emptySchema } from './types';

export interface ViewState {
  activeTask: TaskName;
  serverVersion: number;
  draft: SchemaFile;
  dirty: boolean;
  lastAnalysis: AnnotationsResponse | null;
  metrics: MetricsRow[];
  metricsSort: string;
  /** Labels sent but not yet acknowledged. */
  pendingLabels: Record<string, Verdict>;
  /** Labels the server has acknowledged. */
  confirmedLabels: Record<string, Verdict>;
  banner: string | null;
}

export function initialState(): ViewState {
  return {
    activeTask: 'NER',
    serverVersion: 0,
    draft: emptySchema(),
    dirty: false,
    lastAnalysis: null,
    metrics: [],
    metricsSort: 'name',
    pendingLabels: {},
    confirmedLabels: {},
    banner: null,
  };
}

function cloneSchema(schema: SchemaFile): SchemaFile {
  return JSON.parse(JSON.stringify(schema)) as SchemaFile;
}

export function schemaLoaded(state: ViewState, schema: SchemaFile, version: number): ViewState {
  return { ...state, draft: cloneSchema(schema), serverVersion: version, dirty: false };
}

export function schemaSaved(state: ViewState, version: number): ViewState {
  return { ...state, serverVersion: version, dirty: false, banner: null };
}

/** Apply an edit to the draft; any edit marks the draft unsaved. */
export function editDraft(state: ViewState, edit: (draft: SchemaFile) => void): ViewState {
  const draft = cloneSchema(state.draft);
  edit(draft);
  return { ...state, draft, dirty: true };
}

export function analysisArrived(state: ViewState, analysis: AnnotationsResponse): ViewState {
  return { ...state, lastAnalysis: analysis, banner: null };
}

export function metricsArrived(state: ViewState, rows: MetricsRow[], sort: string): ViewState {
  return { ...state, metrics: rows, metricsSort: sort };
}

export function labelQueued(state: ViewState, id: string, verdict: Verdict): ViewState {
  return { ...state, pendingLabels: { ...state.pendingLabels, [id]: verdict } };
}

export function labelAcknowledged(state: ViewState, id: string): ViewState {
  const pending = { ...state.pendingLabels };
  const verdict = pending[id];
  delete pending[id];
  if (verdict === undefined) return { ...state, pendingLabels: pending };
  return {
    ...state,
    pendingLabels: pending,
    confirmedLabels: { ...state.confirmedLabels, [id]: verdict },
  };
}

export function labelRejected(state: ViewState, id: string, reason: string): ViewState {
  const pending = { ...state.pendingLabels };
  delete pending[id];
  return { ...state, pendingLabels: pending, banner: reason };
}

/** The verdict a card should render right now: optimistic overlay first. */
export function verdictFor(state: ViewState, id: string): Verdict | null {
  return state.pendingLabels[id] ?? state.confirmedLabels[id] ?? null;
}

export function bannerRaised(state: ViewState, message: string): ViewState {
  return { ...state, banner: message };
}

// --- draft edit helpers -------------------------------------------------------

function nextTemplateId(templates: { id: string }[]): string {
  let i = templates.length;
  while (templates.some((t) => t.id === `t${i}`)) i += 1;
  return `t${i}`;
}

export function addEntityType(draft: SchemaFile, name: string, templateText: string): void {
  draft.entity_types.push({ name, templates: [{ id: 't0', text: templateText }] });
}

export function addRelationType(
  draft: SchemaFile,
  name: string,
  templateText: string,
  left: string,
  right: string,
): void {
  draft.relation_types.push({
    name,
    templates: [{ id: 't0', text: templateText }],
    allowed_pairs: [[left, right]],
  });
}

export function addEventType(
  draft: SchemaFile,
  name: string,
  templateText: string,
  triggerMode: TriggerMode,
): void {
  draft.event_types.push({
    name,
    templates: [{ id: 't0', text: templateText }],
    trigger_mode: triggerMode,
  });
}

export function addArgumentRole(
  draft: SchemaFile,
  name: string,
  owningEvent: string,
  templateText: string,
  fillers: string[],
): void {
  draft.argument_roles.push({
    name,
    owning_event: owningEvent,
    templates: [{ id: 't0', text: templateText }],
    allowed_filler_types: fillers,
  });
}

type TypeList = 'entity_types' | 'relation_types' | 'event_types' | 'argument_roles';

export function addTemplate(draft: SchemaFile, list: TypeList, typeName: string, text: string): void {
  const owner = (draft[list] as { name: string; templates: { id: string; text: string }[] }[]).find(
    (t) => t.name === typeName,
  );
  if (!owner) throw new Error(`no such type ${typeName}`);
  owner.templates.push({ id: nextTemplateId(owner.templates), text });
}

export function removeTemplate(draft: SchemaFile, list: TypeList, typeName: string, id: string): void {
  const owner = (draft[list] as { name: string; templates: { id: string }[] }[]).find(
    (t) => t.name === typeName,
  );
  if (!owner) throw new Error(`no such type ${typeName}`);
  owner.templates = owner.templates.filter((t) => t.id !== id);
}

export function addAllowedPair(draft: SchemaFile, relation: string, left: string, right: string): void {
  const owner = draft.relation_types.find((r) => r.name === relation);
  if (!owner) throw new Error(`no such relation ${relation}`);
  owner.allowed_pairs.push([left, right]);
}

export function removeType(draft: SchemaFile, list: TypeList, typeName: string): void {
  const types = draft[list] as { name: string }[];
  const index = types.findIndex((t) => t.name === typeName);
  if (index >= 0) types.splice(index, 1);
}

/** Constraint chips like "PERSON->DATE" shown on a relation card. */
export function pairChips(relation: { allowed_pairs: [string, string][] }): string[] {
  return relation.allowed_pairs.map(([left, right]) => `${left}->${right}`);
}
