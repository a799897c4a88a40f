// Thin HTTP client for the staging service. Network failures and field
// errors are returned as values so the UI can render banners and per-field
// messages without exception plumbing.

import type {
  DiagnosisResponse,
  FieldError,
  IntakePayload,
  ModelSummary,
  WhatIfResponse,
} from './types.js';

export type ApiResult<T> =
  | { kind: 'ok'; data: T }
  | { kind: 'invalid'; errors: FieldError[] }
  | { kind: 'unavailable'; detail: string }
  | { kind: 'network'; detail: string };

export class CdssClient {
  constructor(private readonly baseUrl: string = '') {}

  private async post<T>(route: string, body: unknown): Promise<ApiResult<T>> {
    let response: Response;
    try {
      response = await fetch(`${this.baseUrl}${route}`, {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify(body),
      });
    } catch (err) {
      return { kind: 'network', detail: String(err) };
    }
    if (response.status === 422) {
      const payload = (await response.json()) as { errors: FieldError[] };
      return { kind: 'invalid', errors: payload.errors };
    }
    if (response.status === 503) {
      return { kind: 'unavailable', detail: 'no model loaded' };
    }
    if (!response.ok) {
      return { kind: 'network', detail: `unexpected status ${response.status}` };
    }
    return { kind: 'ok', data: (await response.json()) as T };
  }

  diagnose(payload: IntakePayload): Promise<ApiResult<DiagnosisResponse>> {
    return this.post('/api/v1/diagnose', payload);
  }

  whatif(base: IntakePayload, deltas: IntakePayload): Promise<ApiResult<WhatIfResponse>> {
    return this.post('/api/v1/whatif', { base, deltas });
  }

  async modelSummary(): Promise<ApiResult<ModelSummary>> {
    try {
      const response = await fetch(`${this.baseUrl}/api/v1/model/summary`);
      if (response.status === 503) return { kind: 'unavailable', detail: 'no model loaded' };
      if (!response.ok) return { kind: 'network', detail: `unexpected status ${response.status}` };
      return { kind: 'ok', data: (await response.json()) as ModelSummary };
    } catch (err) {
      return { kind: 'network', detail: String(err) };
    }
  }

  async health(): Promise<boolean> {
    try {
      const response = await fetch(`${this.baseUrl}/api/v1/health`);
      return response.ok;
    } catch {
      return false;
    }
  }
}
