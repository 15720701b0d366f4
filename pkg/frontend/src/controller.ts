/**
 * Async flows between the API client and the view state.
 *
 * Controllers are plain functions from (api, state) to a new state so the
 * interaction contracts are testable without a DOM: a label click issues
 * exactly one POST /label and one metrics refresh; a failed save leaves the
 * draft dirty; analyze errors surface as banners instead of vanishing.
 */

import { ApiError, WorkbenchApi } from './api';
import {
  ViewState,
  analysisArrived,
  bannerRaised,
  labelAcknowledged,
  labelQueued,
  labelRejected,
  metricsArrived,
  schemaLoaded,
  schemaSaved,
} from './state';
import type { AnalyzeRequest, Verdict } from './types';
import { validateDraft } from './validate';

function describe(error: unknown): string {
  if (error instanceof ApiError) {
    if (error.status === 409) return `configuration: ${String(error.body.detail)}`;
    if (error.status === 502) return `backend unavailable, retry shortly: ${String(error.body.detail)}`;
    if (error.status === 422) return `schema rejected: ${JSON.stringify(error.body.detail)}`;
    return `${error.body.error}: ${String(error.body.detail)}`;
  }
  return String(error);
}

export async function loadSchema(api: WorkbenchApi, state: ViewState): Promise<ViewState> {
  try {
    const { schema, version } = await api.getSchema();
    return schemaLoaded(state, schema, version);
  } catch (error) {
    return bannerRaised(state, describe(error));
  }
}

export async function saveSchema(api: WorkbenchApi, state: ViewState): Promise<ViewState> {
  const problem = validateDraft(state.draft);
  if (problem) return bannerRaised(state, problem);
  try {
    const { version } = await api.putSchema(state.draft);
    return schemaSaved(state, version);
  } catch (error) {
    return bannerRaised(state, describe(error));
  }
}

export async function runAnalysis(
  api: WorkbenchApi,
  state: ViewState,
  request: AnalyzeRequest,
): Promise<ViewState> {
  if (state.dirty) {
    return bannerRaised(state, 'the schema has unsaved changes; save before analyzing');
  }
  try {
    const analysis = await api.analyze(request);
    return analysisArrived(state, analysis);
  } catch (error) {
    return bannerRaised(state, describe(error));
  }
}

/**
 * Optimistic labeling: paint the verdict immediately, send exactly one POST,
 * then refresh the metrics board once on acknowledgment.
 */
export async function labelExtraction(
  api: WorkbenchApi,
  state: ViewState,
  id: string,
  verdict: Verdict,
): Promise<ViewState> {
  let next = labelQueued(state, id, verdict);
  try {
    await api.label(id, verdict);
    next = labelAcknowledged(next, id);
  } catch (error) {
    return labelRejected(next, id, describe(error));
  }
  return refreshMetrics(api, next);
}

export async function refreshMetrics(
  api: WorkbenchApi,
  state: ViewState,
  sort?: string,
): Promise<ViewState> {
  const effective = sort ?? state.metricsSort;
  try {
    const { rows } = await api.metrics(undefined, effective);
    return metricsArrived(state, rows, effective);
  } catch (error) {
    return bannerRaised(state, describe(error));
  }
}

export async function updateThreshold(
  api: WorkbenchApi,
  state: ViewState,
  threshold: number,
): Promise<ViewState> {
  try {
    await api.putConfig({ threshold });
    return state;
  } catch (error) {
    return bannerRaised(state, describe(error));
  }
}
