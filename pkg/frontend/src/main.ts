import { SessionApi } from './api.js';
import { SessionController } from './controller.js';
import { EditorDom } from './dom.js';

// Entry point: /?session=<id>&api=<base-url>; api defaults to same origin.

function fail(root: HTMLElement, message: string): void {
  root.replaceChildren();
  const box = document.createElement('div');
  box.className = 'error-screen';
  box.textContent = message;
  root.appendChild(box);
}

async function boot(): Promise<void> {
  const root = document.getElementById('app');
  if (!root) throw new Error('missing #app element');
  const params = new URLSearchParams(window.location.search);
  const sessionId = params.get('session');
  if (!sessionId) {
    fail(root, 'Pass ?session=<id> in the URL (create one via POST /sessions).');
    return;
  }
  const api = new SessionApi(params.get('api') ?? '');
  const controller = new SessionController(api, sessionId);
  const dom = new EditorDom(root, controller);
  try {
    dom.render(await controller.load());
  } catch (err) {
    fail(root, `Could not load session ${sessionId}: ${(err as Error).message}`);
  }
}

void boot();
