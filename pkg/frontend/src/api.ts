// Typed client for the study service HTTP API.  The HTTP function is
// injectable so tests can record or fail requests.

export type HttpClient = (url: string, init?: RequestInit) => Promise<Response>;

export type Identification = 'synthetic' | 'traditional' | 'cannot_tell';

export interface SurveyAnswers {
  effectiveness: number; // 1..4
  quality: number; // 1..4
  identification: Identification;
}

export interface NextItem {
  complete: boolean;
  total: number;
  position?: number;
  blinded_label?: string;
}

export interface Progress {
  completed: number;
  total: number;
  fraction: number;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function asApiError(resp: Response): Promise<ApiError> {
  let code = 'http_error';
  let message = `HTTP ${resp.status}`;
  try {
    const body = await resp.json();
    if (body && typeof body === 'object') {
      code = body.code ?? code;
      message = body.message ?? message;
    }
  } catch {
    // non-JSON error body; keep defaults
  }
  return new ApiError(resp.status, code, message);
}

export class StudyApi {
  constructor(
    private baseUrl: string,
    private http: HttpClient = (url, init) => fetch(url, init),
  ) {}

  async nextItem(reviewerId: string): Promise<NextItem> {
    const resp = await this.http(`${this.baseUrl}/api/reviewers/${encodeURIComponent(reviewerId)}/next`);
    if (!resp.ok) throw await asApiError(resp);
    return (await resp.json()) as NextItem;
  }

  async progress(reviewerId: string): Promise<Progress> {
    const resp = await this.http(`${this.baseUrl}/api/progress/${encodeURIComponent(reviewerId)}`);
    if (!resp.ok) throw await asApiError(resp);
    return (await resp.json()) as Progress;
  }

  /** Resolves with the HTTP status so callers can branch on 409 duplicates. */
  async submitResponse(
    reviewerId: string,
    position: number,
    answers: SurveyAnswers,
  ): Promise<number> {
    const resp = await this.http(`${this.baseUrl}/api/responses`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({
        reviewer_id: reviewerId,
        position,
        effectiveness: answers.effectiveness,
        quality: answers.quality,
        identification: answers.identification,
      }),
    });
    if (resp.ok || resp.status === 409) return resp.status;
    throw await asApiError(resp);
  }

  async fetchImage(label: string, kind: 'he' | 'sox10'): Promise<Uint8Array> {
    const resp = await this.http(`${this.baseUrl}/api/items/${encodeURIComponent(label)}/${kind}`);
    if (!resp.ok) throw await asApiError(resp);
    return new Uint8Array(await resp.arrayBuffer());
  }
}
