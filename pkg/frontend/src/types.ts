/** Wire types mirroring the workbench service API. */

export type TaskName = 'NER' | 'RE' | 'EE' | 'EAE';

export const TASKS: TaskName[] = ['NER', 'RE', 'EE', 'EAE'];

export type Verdict = 'correct' | 'incorrect';

export interface TemplateDef {
  id: string;
  text: string;
}

export interface EntityTypeDef {
  name: string;
  templates: TemplateDef[];
}

export interface RelationTypeDef {
  name: string;
  templates: TemplateDef[];
  allowed_pairs: [string, string][];
}

export type TriggerMode = 'sentence-level' | 'trigger-span';

export interface EventTypeDef {
  name: string;
  templates: TemplateDef[];
  trigger_mode: TriggerMode;
}

export interface ArgumentRoleDef {
  name: string;
  owning_event: string;
  templates: TemplateDef[];
  allowed_filler_types: string[];
}

export interface SchemaFile {
  entity_types: EntityTypeDef[];
  relation_types: RelationTypeDef[];
  event_types: EventTypeDef[];
  argument_roles: ArgumentRoleDef[];
  version: number;
}

export interface SpanView {
  sentence: number;
  start: number;
  end: number;
  text: string;
}

export interface RankedEntry {
  type: string;
  score: number;
  template_id: string;
}

export interface ExtractionView {
  id: string;
  task: TaskName;
  label: string;
  score: number;
  template_id: string | null;
  span: SpanView | null;
  secondary_span: SpanView | null;
  sentence: number;
  context: [string, string] | null;
  ranked: RankedEntry[];
}

export interface SentenceView {
  index: number;
  text: string;
  tokens: { text: string; start: number; end: number; pos: string }[];
}

export interface AnnotationsResponse {
  text: string;
  provenance: { mode: string; schema_version: number; config: Record<string, unknown> };
  incomplete: boolean;
  error: string | null;
  sentences: SentenceView[];
  entities: ExtractionView[];
  relations: ExtractionView[];
  events: ExtractionView[];
  arguments: ExtractionView[];
}

export interface MetricsRow {
  scope: 'task' | 'type' | 'template';
  name: string;
  total: number;
  correct: number;
  incorrect: number;
  accuracy: number | null;
}

export interface GoldEntitySpan {
  sentence: number;
  start: number;
  end: number;
  type: string;
}

export interface GoldEventSpan {
  sentence: number;
  type: string;
  start?: number;
  end?: number;
}

export interface GoldPayload {
  entities?: GoldEntitySpan[];
  events?: GoldEventSpan[];
}

export interface AnalyzeRequest {
  text: string;
  mode: 'e2e' | 'task';
  task?: TaskName;
  gold?: GoldPayload;
}

export interface ApiErrorBody {
  error: string;
  detail: unknown;
}

export function emptySchema(): SchemaFile {
  return {
    entity_types: [],
    relation_types: [],
    event_types: [],
    argument_roles: [],
    version: 1,
  };
}
