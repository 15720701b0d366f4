/**
 * View models and DOM rendering.
 *
 * Everything displayable is computed first as a plain data model from server
 * payloads (so identical API fixtures produce identical models), then turned
 * into DOM by small builder functions.
 */

import type { ViewState } from './state';
import { verdictFor } from './state';
import type {
  AnnotationsResponse,
  ExtractionView,
  MetricsRow,
  TaskName,
  Verdict,
} from './types';

export interface RankedLine {
  type: string;
  score: string;
  templateId: string;
}

export interface CardModel {
  id: string;
  heading: string;
  detail: string;
  score: string;
  templateId: string;
  verdict: Verdict | null;
  ranked: RankedLine[];
}

export interface MetricsRowModel {
  scope: string;
  name: string;
  total: number;
  correct: number;
  incorrect: number;
  /** Formatted accuracy; em-dash when nothing in scope is labeled yet. */
  accuracy: string;
}

const TASK_FIELD: Record<TaskName, keyof AnnotationsResponse> = {
  NER: 'entities',
  RE: 'relations',
  EE: 'events',
  EAE: 'arguments',
};

function fmt(score: number): string {
  return score.toFixed(2);
}

function headingFor(extraction: ExtractionView): string {
  switch (extraction.task) {
    case 'NER':
      return `${extraction.span?.text ?? '?'} is a/an ${extraction.label}`;
    case 'RE':
      return `${extraction.span?.text ?? '?'} → ${extraction.secondary_span?.text ?? '?'}: ${extraction.label}`;
    case 'EE':
      return extraction.span
        ? `${extraction.label} (trigger: ${extraction.span.text})`
        : `${extraction.label} (sentence ${extraction.sentence})`;
    case 'EAE':
      return `${extraction.secondary_span?.text ?? '?'} = ${extraction.label} of ${extraction.context?.[0] ?? '?'}`;
  }
}

export function extractionCards(
  analysis: AnnotationsResponse,
  task: TaskName,
  verdictOf: (id: string) => Verdict | null,
): CardModel[] {
  const extractions = analysis[TASK_FIELD[task]] as ExtractionView[];
  return extractions.map((extraction) => ({
    id: extraction.id,
    heading: headingFor(extraction),
    detail: analysis.sentences[extraction.sentence]?.text ?? '',
    score: fmt(extraction.score),
    templateId: extraction.template_id ?? '',
    verdict: verdictOf(extraction.id),
    ranked: extraction.ranked.map((entry) => ({
      type: entry.type,
      score: fmt(entry.score),
      templateId: entry.template_id,
    })),
  }));
}

export function metricsModels(rows: MetricsRow[]): MetricsRowModel[] {
  return rows.map((row) => ({
    scope: row.scope,
    name: row.name,
    total: row.total,
    correct: row.correct,
    incorrect: row.incorrect,
    accuracy: row.accuracy === null ? '—' : row.accuracy.toFixed(2),
  }));
}

// --- DOM builders ----------------------------------------------------------------

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === 'class') node.className = value;
    else node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export function renderCard(
  model: CardModel,
  onLabel: (id: string, verdict: Verdict) => void,
): HTMLElement {
  const verdictClass =
    model.verdict === 'correct' ? 'card correct' : model.verdict === 'incorrect' ? 'card incorrect' : 'card';
  const plus = el('button', { class: 'label-btn plus', 'data-id': model.id }, ['+']);
  const minus = el('button', { class: 'label-btn minus', 'data-id': model.id }, ['-']);
  plus.addEventListener('click', () => onLabel(model.id, 'correct'));
  minus.addEventListener('click', () => onLabel(model.id, 'incorrect'));
  const ranked = el(
    'ul',
    { class: 'ranked' },
    model.ranked.map((line) =>
      el('li', {}, [`${line.type}  ${line.score}  (template ${line.templateId})`]),
    ),
  );
  return el('div', { class: verdictClass, 'data-extraction': model.id }, [
    el('div', { class: 'card-head' }, [
      el('span', { class: 'heading' }, [model.heading]),
      el('span', { class: 'score' }, [model.score]),
      plus,
      minus,
    ]),
    ranked,
  ]);
}

export function renderMetricsTable(
  models: MetricsRowModel[],
  onSort: (key: string) => void,
): HTMLElement {
  const headers: [string, string][] = [
    ['name', 'name'],
    ['total', 'total'],
    ['correct', 'correct'],
    ['incorrect', 'incorrect'],
    ['accuracy', 'accuracy'],
  ];
  const head = el(
    'tr',
    {},
    headers.map(([key, title]) => {
      const th = el('th', { 'data-sort': key }, [title]);
      th.addEventListener('click', () => onSort(key));
      return th;
    }),
  );
  const body = models.map((m) =>
    el('tr', { class: `metrics-row scope-${m.scope}`, 'data-name': m.name }, [
      el('td', {}, [m.name]),
      el('td', {}, [String(m.total)]),
      el('td', {}, [String(m.correct)]),
      el('td', {}, [String(m.incorrect)]),
      el('td', { class: 'accuracy' }, [m.accuracy]),
    ]),
  );
  return el('table', { class: 'metrics' }, [el('thead', {}, [head]), el('tbody', {}, body)]);
}

export function cardsForState(state: ViewState): CardModel[] {
  if (!state.lastAnalysis) return [];
  return extractionCards(state.lastAnalysis, state.activeTask, (id) => verdictFor(state, id));
}
