import { SessionController } from './controller.js';
import type { Confidence } from './types.js';
import type { SessionView, SliderView } from './view.js';

// Rendering is a full re-render from the latest view; slider edits are sent
// on the 'change' event (release), never per 'input' tick while dragging.

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function formatValue(feature: string, value: number | null): string {
  if (value === null) return '–';
  return feature === 'duration' ? `×${value.toFixed(2)}` : value.toFixed(2);
}

export class EditorDom {
  private statusLine: HTMLElement | null = null;
  private timer: number | undefined;

  constructor(
    private readonly root: HTMLElement,
    private readonly controller: SessionController,
  ) {
    controller.onChange((view) => this.render(view));
  }

  showStatus(message: string): void {
    if (this.statusLine) this.statusLine.textContent = message;
  }

  private slider(view: SliderView): HTMLElement {
    const row = el('div', 'slider-row');
    const label = el('label', 'slider-label', view.label);
    label.htmlFor = view.key;
    row.appendChild(label);

    const input = el('input') as HTMLInputElement;
    input.type = 'range';
    input.id = view.key;
    if (view.enabled && view.lo !== null && view.hi !== null && view.value !== null) {
      input.min = String(view.lo);
      input.max = String(view.hi);
      input.step = String(view.step);
      input.value = String(view.value);
      const readout = el('span', 'slider-value', formatValue(view.feature, view.value));
      input.addEventListener('input', () => {
        readout.textContent = formatValue(view.feature, Number(input.value));
      });
      // release commits exactly one edit; the response re-renders everything
      input.addEventListener('change', () => {
        void this.controller.commitSlider(view, Number(input.value)).then((result) => {
          if (!result.accepted) {
            const range = result.feasible
              ? ` (feasible: ${result.feasible.lo.toFixed(2)} … ${result.feasible.hi.toFixed(2)})`
              : '';
            this.showStatus(`edit rejected: ${result.error}${range}`);
          } else {
            this.showStatus(`${view.label} → ${formatValue(view.feature, result.sent!)}`);
          }
        });
      });
      row.appendChild(input);
      row.appendChild(readout);
    } else {
      input.disabled = true;
      row.appendChild(input);
      row.appendChild(el('span', 'slider-reason', view.reason ?? 'read-only'));
      row.classList.add('disabled');
    }
    return row;
  }

  private audioPlayers(view: SessionView): HTMLElement {
    const box = el('div', 'audio-box');
    const variants: ['reference' | 'original' | 'edited', boolean][] = [
      ['reference', view.hasReference],
      ['original', true],
      ['edited', true],
    ];
    for (const [variant, available] of variants) {
      const wrap = el('div', 'audio-item');
      wrap.appendChild(el('span', 'audio-label', variant));
      if (available) {
        const audio = el('audio') as HTMLAudioElement;
        audio.controls = true;
        audio.preload = 'none'; // edited audio regenerates lazily on play
        audio.src = this.controller.audioUrl(variant);
        wrap.appendChild(audio);
      } else {
        wrap.appendChild(el('span', 'audio-missing', 'not provided'));
      }
      box.appendChild(wrap);
    }
    return box;
  }

  private confidenceAndSubmit(view: SessionView): HTMLElement {
    const box = el('div', 'submit-box');
    const prompt = el('span', 'confidence-prompt', 'How confident are you in this edit?');
    box.appendChild(prompt);
    for (const level of ['low', 'high'] as Confidence[]) {
      const label = el('label', 'confidence-option');
      const radio = el('input') as HTMLInputElement;
      radio.type = 'radio';
      radio.name = 'confidence';
      radio.value = level;
      radio.checked = this.controller.confidence === level;
      radio.addEventListener('change', () => {
        this.controller.chooseConfidence(level);
        submit.disabled = !this.controller.canSubmit;
      });
      label.appendChild(radio);
      label.appendChild(document.createTextNode(level));
      box.appendChild(label);
    }
    const submit = el('button', 'submit-button', 'Submit') as HTMLButtonElement;
    submit.disabled = !this.controller.canSubmit;
    submit.addEventListener('click', () => {
      void this.controller.submit().then((outcome) => {
        if (outcome.record) {
          this.showStatus(
            `submitted: ${outcome.record.op_count} ops in ` +
              `${outcome.record.elapsed_seconds.toFixed(1)} s ` +
              `(confidence ${outcome.record.confidence})`,
          );
        } else {
          this.showStatus(outcome.error ?? 'submit failed');
        }
      });
    });
    box.appendChild(submit);

    const resetButton = el('button', 'reset-button', 'Reset to original');
    resetButton.addEventListener('click', () => {
      void this.controller.reset().then(() => this.showStatus('restored the original track'));
    });
    box.appendChild(resetButton);
    return box;
  }

  render(view: SessionView): void {
    this.root.replaceChildren();
    const heading = el('div', 'session-heading');
    heading.appendChild(el('h1', 'target-text', `“${view.text}”`));
    const counters = el('div', 'counters');
    counters.appendChild(el('span', 'op-counter', `${view.opCount} ops`));
    const elapsed = el('span', 'elapsed');
    counters.appendChild(elapsed);
    heading.appendChild(counters);
    this.root.appendChild(heading);

    if (this.timer !== undefined) window.clearInterval(this.timer);
    const tick = () => {
      const end = view.submittedAt ?? Date.now() / 1000;
      const seconds = Math.max(0, Math.round(end - view.createdAt));
      elapsed.textContent = `${Math.floor(seconds / 60)}:${String(seconds % 60).padStart(2, '0')}`;
    };
    tick();
    if (view.status === 'open') this.timer = window.setInterval(tick, 1000);

    this.root.appendChild(this.audioPlayers(view));

    if (view.status === 'submitted') {
      this.root.appendChild(
        el('div', 'submitted-banner', `Session submitted (confidence: ${view.confidence}).`),
      );
    } else {
      const utteranceBox = el('div', 'utterance-box');
      utteranceBox.appendChild(el('h2', undefined, 'Whole utterance'));
      for (const slider of view.utterance) utteranceBox.appendChild(this.slider(slider));
      this.root.appendChild(utteranceBox);

      const wordsBox = el('div', 'words-box');
      wordsBox.appendChild(el('h2', undefined, 'Words'));
      for (const word of view.words) {
        const wordBox = el('div', 'word-box');
        wordBox.appendChild(el('h3', 'word-title', word.text));
        for (const slider of word.sliders) wordBox.appendChild(this.slider(slider));
        wordsBox.appendChild(wordBox);
      }
      this.root.appendChild(wordsBox);
      this.root.appendChild(this.confidenceAndSubmit(view));
    }

    this.statusLine = el('div', 'status-line', '');
    this.root.appendChild(this.statusLine);
  }
}
