// Wire types for the session-service JSON API. The service is the single
// source of truth for slider bounds; nothing here recomputes ranges.

export type Feature = 'f0' | 'energy' | 'duration';
export type Scope = 'word' | 'utterance';
export type Confidence = 'low' | 'high';
export type AudioVariant = 'reference' | 'original' | 'edited';

export interface SliderState {
  value: number | null;
  lo: number | null;
  hi: number | null;
  enabled: boolean;
  reason?: string;
}

export interface WordSliders {
  word_index: number;
  text: string;
  sliders: Record<Feature, SliderState>;
}

export interface SlidersPayload {
  words: WordSliders[];
  utterance: Record<Feature, SliderState>;
}

export interface EditPayload {
  scope: Scope;
  word_index?: number;
  feature: Feature;
  value: number;
}

export interface LoggedOp {
  op: { scope: Scope | 'reset'; word_index?: number; feature?: Feature; value?: number };
  wall_time_ms: number;
}

export interface TrackDoc {
  id: string;
  text: string;
  f0_domain: 'hz' | 'log_hz';
  words: { text: string; phones: number[] }[];
  phones: { symbol: string; voiced: boolean; f0: number; energy: number; duration: number }[];
}

export interface SessionState {
  session_id: string;
  status: 'open' | 'submitted';
  confidence: 'unset' | Confidence;
  created_at: number;
  submitted_at: number | null;
  backend: string;
  has_reference: boolean;
  text: string;
  op_count: number;
  op_log: LoggedOp[];
  baseline: TrackDoc;
  current: TrackDoc;
  sliders: SlidersPayload;
}

export interface ExportRecordDoc {
  session_id: string;
  confidence: Confidence;
  modified: boolean;
  op_count: number;
  elapsed_seconds: number;
  baseline: TrackDoc;
  edited: TrackDoc;
}

export interface FeasibleInterval {
  lo: number;
  hi: number;
  degenerate?: boolean;
}

export interface ApiErrorDetail {
  error: string;
  feasible?: FeasibleInterval;
  path?: string;
  edit_index?: number;
}
