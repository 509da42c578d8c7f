// DOM layer: builds the review screen and keeps it in sync with the session.

import { StudyApi, Identification } from './api.js';
import { ReviewSession, SessionState } from './state.js';
import { PanZoomPane, SyncedViewer } from './viewer.js';

const B64 = 'ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/';

/** Dependency-free base64 so image bytes become data: URLs in any DOM. */
export function base64encode(bytes: Uint8Array): string {
  let out = '';
  for (let i = 0; i < bytes.length; i += 3) {
    const a = bytes[i];
    const b = i + 1 < bytes.length ? bytes[i + 1] : 0;
    const c = i + 2 < bytes.length ? bytes[i + 2] : 0;
    out += B64[a >> 2] + B64[((a & 3) << 4) | (b >> 4)];
    out += i + 1 < bytes.length ? B64[((b & 15) << 2) | (c >> 6)] : '=';
    out += i + 2 < bytes.length ? B64[c & 63] : '=';
  }
  return out;
}

const RATING_LABELS: Record<number, string> = {
  1: '1 (poor)',
  2: '2',
  3: '3',
  4: '4 (perfect)',
};

const IDENTIFICATION_OPTIONS: Array<{ value: Identification; label: string }> = [
  { value: 'synthetic', label: 'Synthesized' },
  { value: 'traditional', label: 'Immuno-stained' },
  { value: 'cannot_tell', label: 'Cannot tell' },
];

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

function ratingGroup(
  name: string,
  legendText: string,
  onSelect: (value: number) => void,
): HTMLFieldSetElement {
  const fieldset = el('fieldset', 'survey-group');
  fieldset.dataset.group = name;
  fieldset.appendChild(el('legend', undefined, legendText));
  for (const value of [1, 2, 3, 4]) {
    const label = el('label', 'option');
    const input = el('input');
    input.type = 'radio';
    input.name = name;
    input.value = String(value);
    input.addEventListener('change', () => onSelect(value));
    label.appendChild(input);
    label.appendChild(el('span', undefined, RATING_LABELS[value]));
    fieldset.appendChild(label);
  }
  return fieldset;
}

function identificationGroup(onSelect: (value: Identification) => void): HTMLFieldSetElement {
  const fieldset = el('fieldset', 'survey-group');
  fieldset.dataset.group = 'identification';
  fieldset.appendChild(el('legend', undefined, 'Staining identification'));
  for (const option of IDENTIFICATION_OPTIONS) {
    const label = el('label', 'option');
    const input = el('input');
    input.type = 'radio';
    input.name = 'identification';
    input.value = option.value;
    input.addEventListener('change', () => onSelect(option.value));
    label.appendChild(input);
    label.appendChild(el('span', undefined, option.label));
    fieldset.appendChild(label);
  }
  return fieldset;
}

export class ReviewApp {
  readonly root: HTMLElement;
  private progressText: HTMLElement;
  private progressFill: HTMLElement;
  private reviewPane: HTMLElement;
  private completePane: HTMLElement;
  private statusBanner: HTMLElement;
  private retryButton: HTMLButtonElement;
  private submitButton: HTMLButtonElement;
  private surveyPanel: HTMLElement;
  private heImage: HTMLImageElement;
  private soxImage: HTMLImageElement;
  private imageRetry: HTMLButtonElement;
  private viewer: SyncedViewer;
  private syncToggle: HTMLInputElement;
  private currentLabel: string | null = null;

  constructor(
    container: HTMLElement,
    private session: ReviewSession,
    private api: StudyApi,
  ) {
    this.root = el('div', 'review-app');
    container.appendChild(this.root);

    const header = el('header', 'header');
    header.appendChild(el('h1', undefined, 'Slide review'));
    const progress = el('div', 'progress');
    this.progressFill = el('div', 'progress-fill');
    progress.appendChild(this.progressFill);
    this.progressText = el('span', 'progress-text', '');
    header.appendChild(progress);
    header.appendChild(this.progressText);
    this.root.appendChild(header);

    this.statusBanner = el('div', 'status-banner hidden');
    this.retryButton = el('button', 'retry-submit', 'Retry submission');
    this.retryButton.addEventListener('click', () => void this.session.retryPending());
    this.statusBanner.appendChild(el('span', 'status-text', ''));
    this.statusBanner.appendChild(this.retryButton);
    this.root.appendChild(this.statusBanner);

    this.reviewPane = el('main', 'review-pane');
    const panes = el('div', 'panes');
    const leftPane = el('div', 'pane');
    leftPane.appendChild(el('div', 'pane-title', 'H&E'));
    const leftFrame = el('div', 'frame');
    this.heImage = el('img') as HTMLImageElement;
    this.heImage.alt = 'H&E stain';
    leftFrame.appendChild(this.heImage);
    leftPane.appendChild(leftFrame);
    const rightPane = el('div', 'pane');
    rightPane.appendChild(el('div', 'pane-title', 'Sox10'));
    const rightFrame = el('div', 'frame');
    this.soxImage = el('img') as HTMLImageElement;
    this.soxImage.alt = 'Sox10 stain';
    rightFrame.appendChild(this.soxImage);
    rightPane.appendChild(rightFrame);
    panes.appendChild(leftPane);
    panes.appendChild(rightPane);
    this.reviewPane.appendChild(panes);

    this.viewer = new SyncedViewer(
      new PanZoomPane(leftFrame, this.heImage),
      new PanZoomPane(rightFrame, this.soxImage),
    );
    const controls = el('div', 'viewer-controls');
    const syncLabel = el('label', 'option');
    this.syncToggle = el('input') as HTMLInputElement;
    this.syncToggle.type = 'checkbox';
    this.syncToggle.checked = true;
    this.syncToggle.addEventListener('change', () =>
      this.viewer.setSynced(this.syncToggle.checked),
    );
    syncLabel.appendChild(this.syncToggle);
    syncLabel.appendChild(el('span', undefined, 'Synchronize pan/zoom'));
    controls.appendChild(syncLabel);
    const resetButton = el('button', undefined, 'Reset view');
    resetButton.addEventListener('click', () => this.viewer.reset());
    controls.appendChild(resetButton);
    this.imageRetry = el('button', 'image-retry hidden', 'Retry image load');
    this.imageRetry.addEventListener('click', () => void this.loadImages());
    controls.appendChild(this.imageRetry);
    this.reviewPane.appendChild(controls);

    this.surveyPanel = el('div', 'survey');
    this.surveyPanel.appendChild(
      ratingGroup('effectiveness', 'Effectiveness of Sox10 staining (1 = poor to 4 = perfect)',
        (v) => this.session.setAnswer('effectiveness', v)),
    );
    this.surveyPanel.appendChild(
      ratingGroup('quality', 'Image quality (1 = poor to 4 = perfect)',
        (v) => this.session.setAnswer('quality', v)),
    );
    this.surveyPanel.appendChild(
      identificationGroup((v) => this.session.setAnswer('identification', v)),
    );
    this.submitButton = el('button', 'submit', 'Submit review');
    this.submitButton.disabled = true;
    this.submitButton.addEventListener('click', () => void this.session.submit());
    this.surveyPanel.appendChild(this.submitButton);
    this.reviewPane.appendChild(this.surveyPanel);
    this.root.appendChild(this.reviewPane);

    this.completePane = el('div', 'complete hidden');
    this.completePane.appendChild(el('h2', undefined, 'Review complete'));
    this.completePane.appendChild(
      el('p', undefined, 'All slides have been reviewed. Thank you.'),
    );
    this.root.appendChild(this.completePane);

    session.onChange((state) => void this.render(state));
  }

  private async loadImages(): Promise<void> {
    if (this.currentLabel === null) return;
    const label = this.currentLabel;
    this.imageRetry.classList.add('hidden');
    try {
      const [he, sox] = await Promise.all([
        this.api.fetchImage(label, 'he'),
        this.api.fetchImage(label, 'sox10'),
      ]);
      if (this.currentLabel !== label) return; // item advanced meanwhile
      this.heImage.src = `data:image/png;base64,${base64encode(he)}`;
      this.soxImage.src = `data:image/png;base64,${base64encode(sox)}`;
      this.root.dataset.imagesLoaded = label;
    } catch {
      // No skipping: surface a retry prompt and keep the item on screen.
      this.imageRetry.classList.remove('hidden');
      this.root.dataset.imagesLoaded = '';
    }
  }

  private render(state: SessionState): void {
    const pct = state.total > 0 ? Math.round((100 * state.completed) / state.total) : 0;
    this.progressFill.style.width = `${pct}%`;
    this.progressText.textContent =
      state.phase === 'complete'
        ? `${state.total} of ${state.total} reviewed`
        : `${state.completed} of ${state.total} reviewed`;

    const offline = state.phase === 'offline';
    this.statusBanner.classList.toggle('hidden', !offline);
    if (offline) {
      const text = this.statusBanner.querySelector('.status-text') as HTMLElement;
      text.textContent = 'Submission could not reach the server; it is buffered and will be retried.';
    }

    this.completePane.classList.toggle('hidden', state.phase !== 'complete');
    this.reviewPane.classList.toggle(
      'hidden',
      state.phase === 'complete' || state.phase === 'error',
    );

    if (state.item !== null && state.item.blindedLabel !== this.currentLabel) {
      this.currentLabel = state.item.blindedLabel;
      this.viewer.reset();
      this.clearSurvey();
      void this.loadImages();
    }
    if (state.phase === 'complete') this.currentLabel = null;

    this.submitButton.disabled = !this.session.canSubmit();
  }

  private clearSurvey(): void {
    for (const input of Array.from(this.surveyPanel.querySelectorAll('input[type=radio]'))) {
      (input as HTMLInputElement).checked = false;
    }
  }
}

export function bootstrap(container: HTMLElement, baseUrl: string, reviewerId: string): {
  api: StudyApi;
  session: ReviewSession;
  app: ReviewApp;
} {
  const api = new StudyApi(baseUrl);
  const session = new ReviewSession(api, reviewerId);
  const app = new ReviewApp(container, session, api);
  return { api, session, app };
}
