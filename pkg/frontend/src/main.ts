/**
 * DOM wiring for the workbench: task tabs, schema editors, the analyze view
 * with +/- labeling, the sortable metrics board, a threshold slider, and a
 * metrics poll so verdicts recorded elsewhere show up without a reload.
 */

import { WorkbenchApi } from './api';
import {
  labelExtraction,
  loadSchema,
  refreshMetrics,
  runAnalysis,
  saveSchema,
  updateThreshold,
} from './controller';
import { cardsForState, el, metricsModels, renderCard, renderMetricsTable } from './render';
import {
  ViewState,
  addArgumentRole,
  addEntityType,
  addEventType,
  addRelationType,
  addTemplate,
  editDraft,
  initialState,
  pairChips,
  removeTemplate,
  removeType,
} from './state';
import type { AnalyzeRequest, GoldEntitySpan, TaskName, TriggerMode } from './types';
import { TASKS } from './types';
import { validateTemplateText, validateTypeName } from './validate';

const POLL_INTERVAL_MS = 3000;

export class WorkbenchApp {
  state: ViewState = initialState();
  private goldSpans: GoldEntitySpan[] = [];
  private pollTimer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private api: WorkbenchApi,
    private root: HTMLElement,
  ) {}

  async start(pollMs: number = POLL_INTERVAL_MS): Promise<void> {
    this.state = await loadSchema(this.api, this.state);
    this.state = await refreshMetrics(this.api, this.state);
    this.render();
    this.pollTimer = setInterval(() => void this.pollMetrics(), pollMs);
  }

  stop(): void {
    if (this.pollTimer !== null) clearInterval(this.pollTimer);
  }

  private async pollMetrics(): Promise<void> {
    this.state = await refreshMetrics(this.api, this.state);
    this.renderMetrics();
  }

  private update(state: ViewState): void {
    this.state = state;
    this.render();
  }

  // --- user actions ------------------------------------------------------

  async onSave(): Promise<void> {
    this.update(await saveSchema(this.api, this.state));
  }

  async onAnalyze(text: string, mode: 'e2e' | 'task'): Promise<void> {
    const request: AnalyzeRequest = { text, mode };
    if (mode === 'task') {
      request.task = this.state.activeTask;
      if (this.goldSpans.length) request.gold = { entities: this.goldSpans };
    }
    this.update(await runAnalysis(this.api, this.state, request));
  }

  async onLabel(id: string, verdict: 'correct' | 'incorrect'): Promise<void> {
    this.update(await labelExtraction(this.api, this.state, id, verdict));
  }

  async onSort(key: string): Promise<void> {
    this.update(await refreshMetrics(this.api, this.state, key));
  }

  async onThreshold(value: number): Promise<void> {
    this.update(await updateThreshold(this.api, this.state, value));
  }

  onTab(task: TaskName): void {
    this.update({ ...this.state, activeTask: task });
  }

  addGoldSpan(span: GoldEntitySpan): void {
    this.goldSpans.push(span);
    this.render();
  }

  clearGoldSpans(): void {
    this.goldSpans = [];
    this.render();
  }

  // --- rendering -----------------------------------------------------------

  render(): void {
    this.root.replaceChildren(
      this.renderBannerArea(),
      this.renderTabs(),
      this.renderSchemaPanel(),
      this.renderAnalyzePanel(),
      this.renderMetricsPanel(),
    );
  }

  private renderBannerArea(): HTMLElement {
    const area = el('div', { class: 'banner-area' });
    if (this.state.banner) {
      area.append(el('div', { class: 'banner', role: 'alert' }, [this.state.banner]));
    }
    if (this.state.dirty) {
      area.append(el('div', { class: 'unsaved' }, ['schema draft has unsaved changes']));
    }
    return area;
  }

  private renderTabs(): HTMLElement {
    const tabs = TASKS.map((task) => {
      const button = el(
        'button',
        { class: task === this.state.activeTask ? 'tab active' : 'tab', 'data-task': task },
        [task],
      );
      button.addEventListener('click', () => this.onTab(task));
      return button;
    });
    return el('nav', { class: 'tabs' }, tabs);
  }

  private renderSchemaPanel(): HTMLElement {
    const draft = this.state.draft;
    const panel = el('section', { class: 'schema-panel' });
    panel.append(el('h2', {}, [`schema v${this.state.serverVersion}${this.state.dirty ? ' *' : ''}`]));

    const cards = el('div', { class: 'type-cards' });
    const entityNames = draft.entity_types.map((t) => t.name);
    if (this.state.activeTask === 'NER') {
      for (const et of draft.entity_types) {
        cards.append(this.typeCard('entity_types', et.name, et.templates, []));
      }
      cards.append(this.addTypeCard('entity'));
    } else if (this.state.activeTask === 'RE') {
      for (const rt of draft.relation_types) {
        cards.append(this.typeCard('relation_types', rt.name, rt.templates, pairChips(rt)));
      }
      cards.append(this.addTypeCard('relation', entityNames));
    } else if (this.state.activeTask === 'EE') {
      for (const ev of draft.event_types) {
        cards.append(this.typeCard('event_types', ev.name, ev.templates, [ev.trigger_mode]));
      }
      cards.append(this.addTypeCard('event'));
    } else {
      for (const role of draft.argument_roles) {
        cards.append(
          this.typeCard('argument_roles', role.name, role.templates, [
            `event: ${role.owning_event}`,
            `fillers: ${role.allowed_filler_types.join(', ')}`,
          ]),
        );
      }
      cards.append(this.addTypeCard('argument', entityNames));
    }
    panel.append(cards);

    const save = el('button', { class: 'save-schema' }, ['save schema']);
    save.addEventListener('click', () => void this.onSave());
    panel.append(save);
    return panel;
  }

  private typeCard(
    list: 'entity_types' | 'relation_types' | 'event_types' | 'argument_roles',
    name: string,
    templates: { id: string; text: string }[],
    chips: string[],
  ): HTMLElement {
    const chipRow = el(
      'div',
      { class: 'chips' },
      chips.map((chip) => el('span', { class: 'chip' }, [chip])),
    );
    const items = templates.map((tpl) => {
      const minus = el('button', { class: 'tpl-remove', 'data-template': tpl.id }, ['-']);
      minus.addEventListener('click', () =>
        this.update(editDraft(this.state, (draft) => removeTemplate(draft, list, name, tpl.id))),
      );
      return el('li', { 'data-template': tpl.id }, [el('code', {}, [tpl.text]), minus]);
    });
    const input = el('input', {
      class: 'tpl-input',
      placeholder: 'new template, e.g. {X} is a person',
    });
    const error = el('span', { class: 'inline-error' });
    const plus = el('button', { class: 'tpl-add' }, ['+']);
    plus.addEventListener('click', () => {
      const kind =
        list === 'entity_types'
          ? 'entity'
          : list === 'relation_types'
            ? 'relation'
            : list === 'event_types'
              ? 'event'
              : 'argument';
      const mode =
        list === 'event_types'
          ? this.state.draft.event_types.find((e) => e.name === name)?.trigger_mode ?? 'sentence-level'
          : 'sentence-level';
      const problem = validateTemplateText(input.value, kind, mode as TriggerMode);
      if (problem) {
        error.textContent = problem;
        return;
      }
      this.update(editDraft(this.state, (draft) => addTemplate(draft, list, name, input.value)));
    });
    const remove = el('button', { class: 'type-remove' }, ['remove type']);
    remove.addEventListener('click', () =>
      this.update(editDraft(this.state, (draft) => removeType(draft, list, name))),
    );
    return el('div', { class: 'type-card', 'data-type': name }, [
      el('h3', {}, [name]),
      chipRow,
      el('ul', { class: 'templates' }, items),
      el('div', { class: 'tpl-editor' }, [input, plus, error]),
      remove,
    ]);
  }

  private addTypeCard(kind: 'entity' | 'relation' | 'event' | 'argument', entityNames: string[] = []): HTMLElement {
    const name = el('input', { class: 'new-name', placeholder: `new ${kind} type name` });
    const template = el('input', { class: 'new-template', placeholder: 'first template' });
    const error = el('span', { class: 'inline-error' });
    const extraA = el('input', { class: 'new-extra-a', placeholder: '' });
    const extraB = el('input', { class: 'new-extra-b', placeholder: '' });
    const extras: HTMLElement[] = [];
    if (kind === 'relation') {
      extraA.setAttribute('placeholder', `LeftEntityType (${entityNames.join('|') || 'none yet'})`);
      extraB.setAttribute('placeholder', `RightEntityType (${entityNames.join('|') || 'none yet'})`);
      extras.push(extraA, extraB);
    } else if (kind === 'event') {
      extraA.setAttribute('placeholder', 'trigger mode: sentence-level | trigger-span');
      extraA.value = 'sentence-level';
      extras.push(extraA);
    } else if (kind === 'argument') {
      extraA.setAttribute('placeholder', 'owning event');
      extraB.setAttribute('placeholder', 'allowed filler types, comma separated');
      extras.push(extraA, extraB);
    }
    const add = el('button', { class: 'type-add' }, ['+ add type']);
    add.addEventListener('click', () => {
      const existing = [
        ...this.state.draft.entity_types,
        ...this.state.draft.relation_types,
        ...this.state.draft.event_types,
        ...this.state.draft.argument_roles,
      ].map((t) => t.name);
      const nameProblem = validateTypeName(name.value, existing);
      const mode = (kind === 'event' ? extraA.value : 'sentence-level') as TriggerMode;
      const templateProblem = validateTemplateText(template.value, kind, mode);
      const problem = nameProblem ?? templateProblem;
      if (problem) {
        error.textContent = problem;
        return;
      }
      this.update(
        editDraft(this.state, (draft) => {
          if (kind === 'entity') addEntityType(draft, name.value, template.value);
          else if (kind === 'relation') addRelationType(draft, name.value, template.value, extraA.value, extraB.value);
          else if (kind === 'event') addEventType(draft, name.value, template.value, mode);
          else
            addArgumentRole(
              draft,
              name.value,
              extraA.value,
              template.value,
              extraB.value.split(',').map((s) => s.trim()).filter(Boolean),
            );
        }),
      );
    });
    return el('div', { class: 'type-card add-card' }, [
      el('h3', {}, ['+']),
      name,
      template,
      ...extras,
      add,
      error,
    ]);
  }

  private renderAnalyzePanel(): HTMLElement {
    const panel = el('section', { class: 'analyze-panel' });
    const text = el('textarea', {
      class: 'analyze-text',
      placeholder: 'paste a sentence to test the templates',
    });
    if (this.state.lastAnalysis) text.value = this.state.lastAnalysis.text;
    const runE2e = el('button', { class: 'run-e2e' }, ['analyze (pipeline)']);
    const runTask = el('button', { class: 'run-task' }, [`analyze (${this.state.activeTask} only)`]);
    runE2e.addEventListener('click', () => void this.onAnalyze(text.value, 'e2e'));
    runTask.addEventListener('click', () => void this.onAnalyze(text.value, 'task'));

    const goldChips = el(
      'div',
      { class: 'gold-chips' },
      this.goldSpans.map((g) => el('span', { class: 'chip gold' }, [`${g.type}:${g.start}-${g.end}`])),
    );
    const tagButton = el('button', { class: 'tag-gold' }, ['tag selection as gold span']);
    tagButton.addEventListener('click', () => {
      const start = text.selectionStart ?? 0;
      const end = text.selectionEnd ?? 0;
      if (end <= start) return;
      const type = window.prompt('entity type for the selected span?') ?? '';
      if (!type) return;
      this.addGoldSpan({ sentence: 0, start, end, type });
    });
    const clearButton = el('button', { class: 'clear-gold' }, ['clear gold spans']);
    clearButton.addEventListener('click', () => this.clearGoldSpans());

    const threshold = el('input', {
      class: 'threshold-slider',
      type: 'range',
      min: '0',
      max: '1',
      step: '0.05',
      value: '0.5',
    });
    threshold.addEventListener('change', () => void this.onThreshold(Number(threshold.value)));

    const cards = el('div', { class: 'cards' });
    for (const model of cardsForState(this.state)) {
      cards.append(renderCard(model, (id, verdict) => void this.onLabel(id, verdict)));
    }
    if (!cardsForState(this.state).length) {
      cards.append(el('p', { class: 'empty-state' }, ['no extractions yet: analyze some text']));
    }
    panel.append(
      text,
      el('div', { class: 'analyze-controls' }, [runE2e, runTask, tagButton, clearButton, threshold]),
      goldChips,
      cards,
    );
    return panel;
  }

  private metricsPanelNode: HTMLElement | null = null;

  private renderMetricsPanel(): HTMLElement {
    const panel = el('section', { class: 'metrics-panel' });
    panel.append(el('h2', {}, ['metrics']));
    panel.append(renderMetricsTable(metricsModels(this.state.metrics), (key) => void this.onSort(key)));
    const download = el('a', { class: 'devset-link', href: this.api.devsetUrl(), download: 'devset.jsonl' }, [
      'download dev set',
    ]);
    panel.append(download);
    this.metricsPanelNode = panel;
    return panel;
  }

  private renderMetrics(): void {
    if (!this.metricsPanelNode || !this.metricsPanelNode.isConnected) {
      this.render();
      return;
    }
    const fresh = this.renderMetricsPanel();
    this.root.querySelector('.metrics-panel')?.replaceWith(fresh);
  }
}

export function boot(): WorkbenchApp {
  const root = document.getElementById('app');
  if (!root) throw new Error('missing #app mount point');
  const app = new WorkbenchApp(new WorkbenchApi(''), root);
  void app.start();
  return app;
}

declare global {
  interface Window {
    __WORKBENCH_TEST__?: boolean;
  }
}

if (typeof window !== 'undefined' && !window.__WORKBENCH_TEST__) {
  window.addEventListener('DOMContentLoaded', () => boot());
}
