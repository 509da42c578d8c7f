// Shared test doubles: a scriptable HTTP layer and a tiny in-memory server
// mimicking the study API contract.

import { HttpClient, StudyApi, SurveyAnswers } from '../src/api.js';

export interface RecordedExchange {
  url: string;
  method: string;
  requestBody: string | null;
  status: number;
  responseBody: string | null;
  contentType: string;
}

export function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}

export function pngResponse(bytes: Uint8Array): Response {
  const copy = new Uint8Array(bytes);
  return new Response(copy.buffer as ArrayBuffer, {
    status: 200,
    headers: { 'content-type': 'image/png' },
  });
}

/** Minimal PNG header so data URLs look plausible; content is irrelevant. */
export const FAKE_PNG = new Uint8Array([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 1, 2, 3]);

export interface FakeServerOptions {
  totalItems: number;
  failSubmits?: boolean;
  failImages?: boolean;
  duplicatePositions?: Set<number>;
}

/** In-memory stand-in for the study service, good enough for UI unit tests. */
export class FakeServer {
  responses = new Map<number, SurveyAnswers>();
  options: FakeServerOptions;

  constructor(options: FakeServerOptions) {
    this.options = { duplicatePositions: new Set(), ...options };
  }

  private nextPosition(): number {
    for (let i = 0; i < this.options.totalItems; i++) {
      if (!this.responses.has(i) && !this.options.duplicatePositions!.has(i)) return i;
    }
    return this.options.totalItems;
  }

  http: HttpClient = async (url, init) => {
    const method = init?.method ?? 'GET';
    if (url.includes('/next')) {
      const pos = this.nextPosition();
      if (pos >= this.options.totalItems) {
        return jsonResponse(200, { complete: true, total: this.options.totalItems });
      }
      return jsonResponse(200, {
        complete: false,
        position: pos,
        blinded_label: `label-${pos}`,
        total: this.options.totalItems,
      });
    }
    if (url.endsWith('/api/responses') && method === 'POST') {
      if (this.options.failSubmits) throw new TypeError('network down');
      const body = JSON.parse(String(init?.body));
      const pos = body.position as number;
      if (this.responses.has(pos) || this.options.duplicatePositions!.has(pos)) {
        return jsonResponse(409, { code: 'duplicate_response', message: 'already recorded' });
      }
      this.responses.set(pos, {
        effectiveness: body.effectiveness,
        quality: body.quality,
        identification: body.identification,
      });
      return jsonResponse(201, { status: 'recorded', position: pos });
    }
    if (url.includes('/api/items/')) {
      if (this.options.failImages) {
        return jsonResponse(404, { code: 'missing_image', message: 'gone' });
      }
      return pngResponse(FAKE_PNG);
    }
    if (url.includes('/api/progress/')) {
      return jsonResponse(200, {
        completed: this.responses.size,
        total: this.options.totalItems,
        fraction: this.responses.size / this.options.totalItems,
      });
    }
    return jsonResponse(404, { code: 'unknown', message: url });
  };

  api(): StudyApi {
    return new StudyApi('', this.http);
  }
}

/** Wrap an HTTP client, recording every exchange (URL, bodies, status). */
export function recordingHttp(
  inner: HttpClient,
  log: RecordedExchange[],
): HttpClient {
  return async (url, init) => {
    const resp = await inner(url, init);
    const clone = resp.clone();
    const contentType = clone.headers.get('content-type') ?? '';
    let responseBody: string | null = null;
    if (contentType.includes('json') || contentType.includes('text')) {
      responseBody = await clone.text();
    }
    log.push({
      url,
      method: init?.method ?? 'GET',
      requestBody: typeof init?.body === 'string' ? init.body : null,
      status: resp.status,
      responseBody,
      contentType,
    });
    return resp;
  };
}
