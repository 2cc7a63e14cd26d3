import type {
  ApiErrorDetail,
  AudioVariant,
  Confidence,
  EditPayload,
  ExportRecordDoc,
  SessionState,
} from './types.js';

export class ApiError extends Error {
  readonly status: number;
  readonly detail: ApiErrorDetail;

  constructor(status: number, detail: ApiErrorDetail) {
    super(detail.error ?? `HTTP ${status}`);
    this.status = status;
    this.detail = detail;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** What the controller needs from the service; SessionApi is the real one. */
export interface SessionServiceClient {
  getSession(sessionId: string): Promise<SessionState>;
  applyEdit(sessionId: string, edit: EditPayload): Promise<SessionState>;
  reset(sessionId: string): Promise<SessionState>;
  submit(sessionId: string, confidence: Confidence): Promise<ExportRecordDoc>;
  audioUrl(sessionId: string, variant: AudioVariant, rev: number): string;
}

/** Thin typed client for the session service. */
export class SessionApi implements SessionServiceClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    const body = await resp.json();
    if (!resp.ok) {
      const detail = (body as { detail?: ApiErrorDetail }).detail;
      throw new ApiError(resp.status, detail ?? { error: JSON.stringify(body) });
    }
    return body as T;
  }

  getSession(sessionId: string): Promise<SessionState> {
    return this.request(`/sessions/${sessionId}`);
  }

  applyEdit(sessionId: string, edit: EditPayload): Promise<SessionState> {
    return this.request(`/sessions/${sessionId}/edits`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(edit),
    });
  }

  reset(sessionId: string): Promise<SessionState> {
    return this.request(`/sessions/${sessionId}/reset`, { method: 'POST' });
  }

  submit(sessionId: string, confidence: Confidence): Promise<ExportRecordDoc> {
    return this.request(`/sessions/${sessionId}/submit`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ confidence }),
    });
  }

  /** Audio is fetched by the <audio> element itself; rev busts its cache
   * after each accepted edit so "edited" regenerates lazily on play. */
  audioUrl(sessionId: string, variant: AudioVariant, rev: number): string {
    return `${this.baseUrl}/sessions/${sessionId}/audio?variant=${variant}&rev=${rev}`;
  }
}
