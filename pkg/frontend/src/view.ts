import type { Feature, SessionState, SliderState } from './types.js';

// Pure view model: everything rendered is derived from the latest service
// response and nothing else, so reloading a session reproduces the same UI.

export interface SliderView {
  key: string; // stable DOM identity, e.g. "word-2-f0" | "utterance-duration"
  scope: 'word' | 'utterance';
  feature: Feature;
  wordIndex: number | null;
  label: string;
  value: number | null;
  lo: number | null;
  hi: number | null;
  enabled: boolean;
  /** why a slider is read-only (all-voiceless word, degenerate range, ...) */
  reason: string | null;
  /** slider step in feature units; linear scale between lo and hi */
  step: number;
}

export interface SessionView {
  sessionId: string;
  text: string;
  status: 'open' | 'submitted';
  confidence: 'unset' | 'low' | 'high';
  opCount: number;
  createdAt: number;
  submittedAt: number | null;
  hasReference: boolean;
  words: { wordIndex: number; text: string; sliders: SliderView[] }[];
  utterance: SliderView[];
  submittable: boolean;
}

export const FEATURES: Feature[] = ['f0', 'energy', 'duration'];

const SLIDER_STEPS = 200; // positions across [lo, hi]; linear in feature units

function sliderView(
  scope: 'word' | 'utterance',
  feature: Feature,
  wordIndex: number | null,
  label: string,
  state: SliderState,
): SliderView {
  const span =
    state.enabled && state.lo !== null && state.hi !== null ? state.hi - state.lo : 0;
  return {
    key: scope === 'word' ? `word-${wordIndex}-${feature}` : `utterance-${feature}`,
    scope,
    feature,
    wordIndex,
    label,
    value: state.value,
    lo: state.lo,
    hi: state.hi,
    enabled: state.enabled,
    reason: state.reason ?? null,
    step: span > 0 ? span / SLIDER_STEPS : 1,
  };
}

export function buildSessionView(state: SessionState): SessionView {
  const words = state.sliders.words.map((word) => ({
    wordIndex: word.word_index,
    text: word.text,
    sliders: FEATURES.map((feature) =>
      sliderView('word', feature, word.word_index, `${word.text} ${feature}`, word.sliders[feature]),
    ),
  }));
  const utterance = FEATURES.map((feature) =>
    sliderView('utterance', feature, null, `utterance ${feature}`, state.sliders.utterance[feature]),
  );
  return {
    sessionId: state.session_id,
    text: state.text,
    status: state.status,
    confidence: state.confidence,
    opCount: state.op_count,
    createdAt: state.created_at,
    submittedAt: state.submitted_at,
    hasReference: state.has_reference,
    words,
    utterance,
    submittable: state.status === 'open' && state.confidence !== 'unset',
  };
}

/** Clamp a slider position into the service-provided bounds before sending. */
export function clampToBounds(slider: SliderView, value: number): number {
  if (!slider.enabled || slider.lo === null || slider.hi === null) {
    throw new Error(`slider ${slider.key} is read-only`);
  }
  return Math.min(Math.max(value, slider.lo), slider.hi);
}
