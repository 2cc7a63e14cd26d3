import { ApiError, SessionServiceClient } from './api.js';
import type {
  AudioVariant,
  Confidence,
  EditPayload,
  ExportRecordDoc,
  FeasibleInterval,
  SessionState,
} from './types.js';
import { SessionView, SliderView, buildSessionView, clampToBounds } from './view.js';

export interface CommitResult {
  accepted: boolean;
  /** value actually sent (slider position clamped into the service bounds) */
  sent?: number;
  error?: string;
  feasible?: FeasibleInterval;
}

export interface SubmitOutcome {
  record: ExportRecordDoc | null;
  error?: string;
  alreadySubmitted?: boolean;
}

/**
 * DOM-free session logic: one service edit per slider release, submissions
 * serialized (one request in flight), state replaced wholesale from each
 * response so the rendered UI is always a pure function of the latest one.
 */
export class SessionController {
  private state: SessionState | null = null;
  private pendingConfidence: Confidence | null = null;
  private audioRev = 0;
  private queue: Promise<unknown> = Promise.resolve();
  private listeners: ((view: SessionView) => void)[] = [];

  constructor(
    private readonly api: SessionServiceClient,
    private readonly sessionId: string,
  ) {}

  onChange(listener: (view: SessionView) => void): void {
    this.listeners.push(listener);
  }

  get view(): SessionView {
    if (!this.state) throw new Error('session not loaded');
    return buildSessionView(this.state);
  }

  get confidence(): Confidence | null {
    return this.pendingConfidence;
  }

  get canSubmit(): boolean {
    return this.state?.status === 'open' && this.pendingConfidence !== null;
  }

  /** Revision counter for lazy edited-audio refresh: bumped only when the
   * current track may have changed. */
  get audioRevision(): number {
    return this.audioRev;
  }

  audioUrl(variant: AudioVariant): string {
    return this.api.audioUrl(this.sessionId, variant, this.audioRev);
  }

  private replaceState(state: SessionState): void {
    this.state = state;
    const view = buildSessionView(state);
    for (const listener of this.listeners) listener(view);
  }

  /** Everything rendered comes from this response; calling it again (a
   * reload) reproduces the identical view. */
  async load(): Promise<SessionView> {
    const state = await this.api.getSession(this.sessionId);
    this.replaceState(state);
    return this.view;
  }

  private enqueue<T>(task: () => Promise<T>): Promise<T> {
    const next = this.queue.then(task, task);
    this.queue = next.catch(() => undefined);
    return next;
  }

  /**
   * One slider release -> exactly one edit request. The raw position is
   * clamped into the service-provided bounds first; a rejection leaves the
   * state untouched (the slider snaps back on re-render) and carries the
   * feasible interval for display.
   */
  commitSlider(slider: SliderView, rawValue: number): Promise<CommitResult> {
    if (!slider.enabled) {
      return Promise.resolve({ accepted: false, error: slider.reason ?? 'slider is read-only' });
    }
    const value = clampToBounds(slider, rawValue);
    const edit: EditPayload =
      slider.scope === 'word'
        ? { scope: 'word', word_index: slider.wordIndex!, feature: slider.feature, value }
        : { scope: 'utterance', feature: slider.feature, value };
    return this.enqueue(async () => {
      try {
        const state = await this.api.applyEdit(this.sessionId, edit);
        this.audioRev += 1;
        this.replaceState(state);
        return { accepted: true, sent: value };
      } catch (err) {
        if (err instanceof ApiError) {
          if (this.state) this.replaceState(this.state); // snap back
          return {
            accepted: false,
            sent: value,
            error: err.detail.error,
            feasible: err.detail.feasible,
          };
        }
        throw err;
      }
    });
  }

  reset(): Promise<SessionView> {
    return this.enqueue(async () => {
      const state = await this.api.reset(this.sessionId);
      this.audioRev += 1;
      this.replaceState(state);
      return this.view;
    });
  }

  chooseConfidence(confidence: Confidence): void {
    this.pendingConfidence = confidence;
  }

  /** Submission is blocked until a confidence level was chosen. */
  submit(): Promise<SubmitOutcome> {
    if (!this.canSubmit) {
      const error =
        this.state?.status === 'submitted'
          ? 'session already submitted'
          : 'choose a confidence level before submitting';
      return Promise.resolve({ record: null, error });
    }
    const confidence = this.pendingConfidence!;
    return this.enqueue(async () => {
      try {
        const record = await this.api.submit(this.sessionId, confidence);
        const state = await this.api.getSession(this.sessionId);
        this.replaceState(state);
        return { record };
      } catch (err) {
        if (err instanceof ApiError && err.status === 409) {
          const state = await this.api.getSession(this.sessionId);
          this.replaceState(state);
          return { record: null, error: err.detail.error, alreadySubmitted: true };
        }
        if (err instanceof ApiError) {
          return { record: null, error: err.detail.error };
        }
        throw err;
      }
    });
  }
}
