/** Thin typed client for the workbench service. */

import type {
  AnalyzeRequest,
  AnnotationsResponse,
  ApiErrorBody,
  MetricsRow,
  SchemaFile,
  Verdict,
} from './types';

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: ApiErrorBody,
  ) {
    super(`${body.error}: ${JSON.stringify(body.detail)}`);
  }
}

async function asError(resp: Response): Promise<ApiError> {
  let body: ApiErrorBody;
  try {
    body = (await resp.json()) as ApiErrorBody;
  } catch {
    body = { error: `http_${resp.status}`, detail: resp.statusText };
  }
  return new ApiError(resp.status, body);
}

export class WorkbenchApi {
  constructor(
    private base = '',
    private fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(`${this.base}${path}`, init);
    if (!resp.ok) throw await asError(resp);
    return (await resp.json()) as T;
  }

  getSchema(): Promise<{ schema: SchemaFile; version: number }> {
    return this.json('/schema');
  }

  putSchema(schema: SchemaFile): Promise<{ version: number }> {
    return this.json('/schema', {
      method: 'PUT',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(schema),
    });
  }

  analyze(request: AnalyzeRequest): Promise<AnnotationsResponse> {
    return this.json('/analyze', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(request),
    });
  }

  label(extractionId: string, verdict: Verdict): Promise<{ extraction_id: string }> {
    return this.json('/label', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ extraction_id: extractionId, verdict }),
    });
  }

  metrics(scope?: string, sort = 'name'): Promise<{ rows: MetricsRow[] }> {
    const params = new URLSearchParams({ sort });
    if (scope) params.set('scope', scope);
    return this.json(`/metrics?${params}`);
  }

  getConfig(): Promise<Record<string, unknown>> {
    return this.json('/config');
  }

  putConfig(update: Record<string, unknown>): Promise<Record<string, unknown>> {
    return this.json('/config', {
      method: 'PUT',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(update),
    });
  }

  devsetUrl(): string {
    return `${this.base}/devset`;
  }
}
