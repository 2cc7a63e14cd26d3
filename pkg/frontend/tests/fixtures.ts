import type {
  Confidence,
  EditPayload,
  ExportRecordDoc,
  SessionState,
  SliderState,
  TrackDoc,
} from '../src/types.js';
import type { SessionServiceClient } from '../src/api.js';

export function slider(
  value: number | null,
  lo: number | null,
  hi: number | null,
  enabled: boolean,
  reason?: string,
): SliderState {
  return reason === undefined ? { value, lo, hi, enabled } : { value, lo, hi, enabled, reason };
}

const TRACK: TrackDoc = {
  id: 'fx',
  text: 'hello there',
  f0_domain: 'hz',
  words: [
    { text: 'hello', phones: [0, 1] },
    { text: 'there', phones: [2, 3] },
  ],
  phones: [
    { symbol: 'HH', voiced: true, f0: 180, energy: 1.2, duration: 0.1 },
    { symbol: 'EH', voiced: true, f0: 210, energy: 1.4, duration: 0.12 },
    { symbol: 'DH', voiced: false, f0: 0, energy: 0.9, duration: 0.06 },
    { symbol: 'T', voiced: false, f0: 0, energy: 0.8, duration: 0.05 },
  ],
};

/** A session whose second word is all-voiceless (its F0 slider is off). */
export function sessionState(overrides: Partial<SessionState> = {}): SessionState {
  return {
    session_id: 'sess-1',
    status: 'open',
    confidence: 'unset',
    created_at: 1000,
    submitted_at: null,
    backend: 'mock',
    has_reference: true,
    text: TRACK.text,
    op_count: 0,
    op_log: [],
    baseline: TRACK,
    current: TRACK,
    sliders: {
      words: [
        {
          word_index: 0,
          text: 'hello',
          sliders: {
            f0: slider(195, 130, 260, true),
            energy: slider(1.3, 0.9, 1.8, true),
            duration: slider(1.0, 0, 2, true),
          },
        },
        {
          word_index: 1,
          text: 'there',
          sliders: {
            f0: slider(null, null, null, false, 'no voiced phones'),
            energy: slider(0.85, 0.7, 1.6, true),
            duration: slider(1.0, 0, 2, true),
          },
        },
      ],
      utterance: {
        f0: slider(0, -60, 55, true),
        energy: slider(0, -0.3, 0.25, true),
        duration: slider(1.0, 0, 2, true),
      },
    },
    ...overrides,
  };
}

export interface Call {
  method: string;
  edit?: EditPayload;
  confidence?: Confidence;
}

/** In-memory service double recording every request the controller makes. */
export class FakeApi implements SessionServiceClient {
  calls: Call[] = [];
  state: SessionState;
  rejectNextEdit: { status: number; detail: Record<string, unknown> } | null = null;
  editDelay: (() => Promise<void>) | null = null;

  constructor(state: SessionState = sessionState()) {
    this.state = state;
  }

  async getSession(): Promise<SessionState> {
    this.calls.push({ method: 'getSession' });
    return structuredClone(this.state);
  }

  async applyEdit(_id: string, edit: EditPayload): Promise<SessionState> {
    this.calls.push({ method: 'applyEdit', edit });
    if (this.editDelay) await this.editDelay();
    if (this.rejectNextEdit) {
      const { status, detail } = this.rejectNextEdit;
      this.rejectNextEdit = null;
      const { ApiError } = await import('../src/api.js');
      throw new ApiError(status, detail as never);
    }
    this.state = structuredClone(this.state);
    this.state.op_count += 1;
    this.state.op_log.push({ op: { ...edit }, wall_time_ms: this.state.op_count * 1000 });
    return structuredClone(this.state);
  }

  async reset(): Promise<SessionState> {
    this.calls.push({ method: 'reset' });
    this.state = structuredClone(this.state);
    this.state.op_count += 1;
    this.state.op_log.push({ op: { scope: 'reset' }, wall_time_ms: this.state.op_count * 1000 });
    return structuredClone(this.state);
  }

  async submit(_id: string, confidence: Confidence): Promise<ExportRecordDoc> {
    this.calls.push({ method: 'submit', confidence });
    if (this.state.status === 'submitted') {
      const { ApiError } = await import('../src/api.js');
      throw new ApiError(409, { error: 'session already submitted' });
    }
    this.state = structuredClone(this.state);
    this.state.status = 'submitted';
    this.state.confidence = confidence;
    this.state.submitted_at = this.state.created_at + 120;
    return {
      session_id: this.state.session_id,
      confidence,
      modified: this.state.op_count > 0,
      op_count: this.state.op_count,
      elapsed_seconds: 120,
      baseline: this.state.baseline,
      edited: this.state.current,
    };
  }

  audioUrl(sessionId: string, variant: string, rev: number): string {
    return `/sessions/${sessionId}/audio?variant=${variant}&rev=${rev}`;
  }

  editCalls(): EditPayload[] {
    return this.calls.filter((c) => c.method === 'applyEdit').map((c) => c.edit!);
  }
}
