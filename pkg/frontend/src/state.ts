// Review session state machine, free of DOM concerns.
//
// Invariants: the client never learns the staining method (the server only
// sends blinded labels); a submission is never dropped - network failures
// buffer it for retry, and a 409 duplicate means the server already has it,
// so the session resynchronizes from next_item.

import { NextItem, StudyApi, SurveyAnswers } from './api.js';

export type Phase = 'loading' | 'reviewing' | 'submitting' | 'offline' | 'complete' | 'error';

export interface CurrentItem {
  position: number;
  blindedLabel: string;
  total: number;
}

export interface SessionState {
  phase: Phase;
  item: CurrentItem | null;
  answers: Partial<SurveyAnswers>;
  completed: number;
  total: number;
  lastError: string | null;
  pendingRetry: boolean;
}

interface BufferedSubmission {
  position: number;
  answers: SurveyAnswers;
}

export class ReviewSession {
  private state: SessionState = {
    phase: 'loading',
    item: null,
    answers: {},
    completed: 0,
    total: 0,
    lastError: null,
    pendingRetry: false,
  };
  private buffered: BufferedSubmission | null = null;
  private listeners: Array<(s: SessionState) => void> = [];

  constructor(
    private api: StudyApi,
    readonly reviewerId: string,
  ) {}

  onChange(listener: (s: SessionState) => void): void {
    this.listeners.push(listener);
  }

  getState(): SessionState {
    return { ...this.state, answers: { ...this.state.answers } };
  }

  private update(patch: Partial<SessionState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.getState());
  }

  async start(): Promise<void> {
    await this.advance();
  }

  private async advance(): Promise<void> {
    this.update({ phase: 'loading', answers: {}, lastError: null });
    let next: NextItem;
    try {
      next = await this.api.nextItem(this.reviewerId);
    } catch (err) {
      this.update({ phase: 'error', lastError: String(err) });
      return;
    }
    if (next.complete) {
      this.update({
        phase: 'complete',
        item: null,
        completed: next.total,
        total: next.total,
      });
      return;
    }
    this.update({
      phase: 'reviewing',
      item: {
        position: next.position!,
        blindedLabel: next.blinded_label!,
        total: next.total,
      },
      completed: next.position!,
      total: next.total,
    });
  }

  setAnswer<K extends keyof SurveyAnswers>(field: K, value: SurveyAnswers[K]): void {
    if (this.state.phase !== 'reviewing') return;
    this.update({ answers: { ...this.state.answers, [field]: value } });
  }

  /** Submission is allowed only once all three survey fields are answered. */
  canSubmit(): boolean {
    const a = this.state.answers;
    return (
      this.state.phase === 'reviewing' &&
      a.effectiveness !== undefined &&
      a.quality !== undefined &&
      a.identification !== undefined
    );
  }

  async submit(): Promise<void> {
    if (!this.canSubmit() || this.state.item === null) return;
    const submission: BufferedSubmission = {
      position: this.state.item.position,
      answers: this.state.answers as SurveyAnswers,
    };
    this.update({ phase: 'submitting' });
    await this.deliver(submission);
  }

  private async deliver(submission: BufferedSubmission): Promise<void> {
    try {
      // Status 2xx records it; 409 means the server already has this
      // position, so either way the submission is safely on the server side.
      await this.api.submitResponse(this.reviewerId, submission.position, submission.answers);
    } catch (err) {
      this.buffered = submission;
      this.update({
        phase: 'offline',
        pendingRetry: true,
        lastError: String(err),
      });
      return;
    }
    this.buffered = null;
    this.update({ pendingRetry: false });
    await this.advance();
  }

  /** Retry a submission buffered by a network failure.  No-op when online. */
  async retryPending(): Promise<void> {
    if (this.buffered === null) return;
    const submission = this.buffered;
    this.update({ phase: 'submitting', lastError: null });
    await this.deliver(submission);
  }

  hasPendingSubmission(): boolean {
    return this.buffered !== null;
  }
}
