import { describe, expect, it } from 'vitest';

import { SessionController } from '../src/controller.js';
import { FakeApi, sessionState } from './fixtures.js';

async function loaded(api = new FakeApi()) {
  const controller = new SessionController(api, 'sess-1');
  await controller.load();
  return { api, controller };
}

function f0Slider(controller: SessionController, word = 0) {
  return controller.view.words[word].sliders.find((s) => s.feature === 'f0')!;
}

describe('slider commits', () => {
  it('sends exactly one edit per release', async () => {
    const { api, controller } = await loaded();
    const result = await controller.commitSlider(f0Slider(controller), 200);
    expect(result.accepted).toBe(true);
    expect(api.editCalls()).toEqual([
      { scope: 'word', word_index: 0, feature: 'f0', value: 200 },
    ]);
    expect(controller.view.opCount).toBe(1);
    // a second release on the utterance duration slider: one more op, no extras
    const duration = controller.view.utterance.find((s) => s.feature === 'duration')!;
    await controller.commitSlider(duration, 1.5);
    expect(api.editCalls()).toHaveLength(2);
    expect(api.editCalls()[1]).toEqual({ scope: 'utterance', feature: 'duration', value: 1.5 });
    expect(controller.view.opCount).toBe(2);
  });

  it('clamps the raw drag position into the service bounds before sending', async () => {
    const { api, controller } = await loaded();
    await controller.commitSlider(f0Slider(controller), 9999);
    expect(api.editCalls()[0].value).toBe(260); // hi bound from the service
  });

  it('identity release still logs one op', async () => {
    const { api, controller } = await loaded();
    const slider = f0Slider(controller);
    await controller.commitSlider(slider, slider.value!);
    expect(api.editCalls()).toHaveLength(1);
    expect(controller.view.opCount).toBe(1);
  });

  it('never posts for a disabled slider', async () => {
    const { api, controller } = await loaded();
    const disabled = f0Slider(controller, 1);
    const result = await controller.commitSlider(disabled, 100);
    expect(result.accepted).toBe(false);
    expect(result.error).toMatch(/no voiced phones/);
    expect(api.editCalls()).toHaveLength(0);
  });

  it('a rejection keeps the state (snap back) and carries the feasible interval', async () => {
    const { api, controller } = await loaded();
    const before = controller.view;
    api.rejectNextEdit = {
      status: 409,
      detail: { error: 'range violation', feasible: { lo: 130, hi: 260 } },
    };
    const result = await controller.commitSlider(f0Slider(controller), 250);
    expect(result.accepted).toBe(false);
    expect(result.feasible).toEqual({ lo: 130, hi: 260 });
    expect(controller.view).toEqual(before);
    expect(controller.view.opCount).toBe(0);
  });

  it('serializes edits: one request in flight at a time', async () => {
    const api = new FakeApi();
    const controller = new SessionController(api, 'sess-1');
    await controller.load();
    let release: () => void = () => undefined;
    let inFlight = 0;
    let maxInFlight = 0;
    api.editDelay = () => {
      inFlight += 1;
      maxInFlight = Math.max(maxInFlight, inFlight);
      return new Promise<void>((resolve) => {
        release = () => {
          inFlight -= 1;
          resolve();
        };
      });
    };
    const tick = () => new Promise<void>((resolve) => setTimeout(resolve, 0));
    const slider = f0Slider(controller);
    const first = controller.commitSlider(slider, 210);
    const second = controller.commitSlider(slider, 220);
    await tick();
    // only the first request has started
    expect(api.editCalls()).toHaveLength(1);
    release();
    await first;
    await tick();
    expect(api.editCalls()).toHaveLength(2);
    release();
    await second;
    expect(maxInFlight).toBe(1);
  });

  it('bumps the audio revision only on accepted edits', async () => {
    const { api, controller } = await loaded();
    expect(controller.audioRevision).toBe(0);
    await controller.commitSlider(f0Slider(controller), 210);
    expect(controller.audioRevision).toBe(1);
    expect(controller.audioUrl('edited')).toContain('variant=edited&rev=1');
    api.rejectNextEdit = { status: 409, detail: { error: 'range violation' } };
    await controller.commitSlider(f0Slider(controller), 220);
    expect(controller.audioRevision).toBe(1);
  });
});

describe('submit', () => {
  it('is blocked until a confidence level is chosen', async () => {
    const { api, controller } = await loaded();
    const outcome = await controller.submit();
    expect(outcome.record).toBeNull();
    expect(outcome.error).toMatch(/confidence/);
    expect(api.calls.filter((c) => c.method === 'submit')).toHaveLength(0);
  });

  it('submits with the chosen confidence and locks the session', async () => {
    const { api, controller } = await loaded();
    await controller.commitSlider(f0Slider(controller), 210);
    controller.chooseConfidence('low');
    expect(controller.canSubmit).toBe(true);
    const outcome = await controller.submit();
    expect(outcome.record).not.toBeNull();
    expect(outcome.record!.confidence).toBe('low');
    expect(outcome.record!.op_count).toBe(1);
    expect(api.calls.filter((c) => c.method === 'submit')).toHaveLength(1);
    expect(controller.view.status).toBe('submitted');
    expect(controller.canSubmit).toBe(false);
  });

  it('surfaces double submits as already-submitted', async () => {
    const { controller } = await loaded();
    controller.chooseConfidence('high');
    await controller.submit();
    controller.chooseConfidence('high');
    const second = await controller.submit();
    expect(second.record).toBeNull();
    expect(second.error).toMatch(/already submitted/);
  });
});

describe('load and reload', () => {
  it('reload reproduces the identical view from the server state', async () => {
    const { api, controller } = await loaded();
    await controller.commitSlider(f0Slider(controller), 205);
    const before = controller.view;
    const fresh = new SessionController(api, 'sess-1');
    await fresh.load();
    expect(fresh.view).toEqual(before);
  });

  it('reset restores the baseline through the service and counts as an op', async () => {
    const { api, controller } = await loaded();
    await controller.commitSlider(f0Slider(controller), 205);
    await controller.reset();
    expect(api.calls.map((c) => c.method)).toEqual(['getSession', 'applyEdit', 'reset']);
    expect(controller.view.opCount).toBe(2);
  });

  it('loading an all-voiceless-word session keeps other features usable', async () => {
    const { controller } = await loaded(new FakeApi(sessionState()));
    const word = controller.view.words[1];
    const byFeature = Object.fromEntries(word.sliders.map((s) => [s.feature, s.enabled]));
    expect(byFeature).toEqual({ f0: false, energy: true, duration: true });
  });
});
