/** Case-console state. Every value on screen comes from a confirmed service
 * response; nothing is updated optimistically. Each panel tags its requests
 * with a sequence number and a response is applied only when it belongs to
 * the panel's most recently issued request, so rapid successive edits can
 * never render out-of-order results. */

import type { ServiceApi } from "./api.js";
import type {
  CaseResponse,
  EventPayload,
  EventView,
  PredictionResponse,
  RecommendationResponse,
  Scalar,
} from "./types.js";

export interface WhatIfView {
  overlay: Record<string, Scalar | null>;
  result: PredictionResponse | null;
}

export interface ConsoleState {
  caseId: string | null;
  closed: boolean;
  caseAttributes: Record<string, Scalar>;
  events: EventView[];
  predictions: Record<string, PredictionResponse>;
  recommendations: Record<string, RecommendationResponse>;
  whatIf: WhatIfView;
  inlineError: string | null;
}

export function initialState(): ConsoleState {
  return {
    caseId: null,
    closed: false,
    caseAttributes: {},
    events: [],
    predictions: {},
    recommendations: {},
    whatIf: { overlay: {}, result: null },
    inlineError: null,
  };
}

export class ConsoleStore {
  state: ConsoleState = initialState();
  private sequence = 0;
  private issued = new Map<string, number>();
  private applied = new Map<string, number>();
  private listeners: Array<(state: ConsoleState) => void> = [];

  constructor(
    private readonly api: ServiceApi,
    private goals: string[] = [],
  ) {}

  onChange(listener: (state: ConsoleState) => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  setGoals(goals: string[]): void {
    this.goals = [...goals];
  }

  /** Issue a request ticket for a panel. */
  begin(panel: string): number {
    this.sequence += 1;
    this.issued.set(panel, this.sequence);
    return this.sequence;
  }

  /** Apply a response unless a newer request was issued for the panel in the
   * meantime (stale responses are discarded). Returns whether it rendered. */
  apply(panel: string, sequence: number, mutate: (state: ConsoleState) => void): boolean {
    if (sequence !== this.issued.get(panel)) {
      return false;
    }
    if (sequence <= (this.applied.get(panel) ?? 0)) {
      return false;
    }
    this.applied.set(panel, sequence);
    mutate(this.state);
    this.notify();
    return true;
  }

  async refreshCase(caseId: string): Promise<void> {
    const ticket = this.begin("case");
    const body: CaseResponse = await this.api.getCase(caseId);
    this.apply("case", ticket, (state) => {
      state.caseId = body.case_id;
      state.closed = body.closed;
      state.caseAttributes = body.case_attributes;
      state.events = body.events;
    });
  }

  async refreshGoal(caseId: string, goal: string): Promise<void> {
    const predictionTicket = this.begin(`prediction:${goal}`);
    const recommendationTicket = this.begin(`recommendation:${goal}`);
    const [prediction, recommendation] = await Promise.all([
      this.api.getPrediction(caseId, goal),
      this.api.getRecommendation(caseId, goal),
    ]);
    this.apply(`prediction:${goal}`, predictionTicket, (state) => {
      state.predictions[goal] = prediction;
    });
    this.apply(`recommendation:${goal}`, recommendationTicket, (state) => {
      state.recommendations[goal] = recommendation;
    });
  }

  async refreshAll(caseId: string): Promise<void> {
    await this.refreshCase(caseId);
    for (const goal of this.goals) {
      await this.refreshGoal(caseId, goal);
    }
  }

  /** Submit a composed event. On acceptance the whole view refreshes from
   * the service; on rejection only the inline error changes. */
  async submitEvent(caseId: string, payload: EventPayload): Promise<boolean> {
    const response = await this.api.postEvent(caseId, payload);
    if (!response.accepted) {
      this.state.inlineError = response.reason;
      this.notify();
      return false;
    }
    this.state.inlineError = null;
    await this.refreshAll(caseId);
    return true;
  }

  /** Ask the hypothetical question; the case itself is never touched. */
  async runWhatIf(
    caseId: string,
    goal: string,
    overlay: Record<string, Scalar | null>,
  ): Promise<void> {
    const ticket = this.begin("whatif");
    const result = await this.api.postWhatIf(caseId, goal, overlay);
    this.apply("whatif", ticket, (state) => {
      state.whatIf = { overlay, result };
    });
  }

  /** Overlay values to pre-fill the next event form ("apply" button). */
  whatIfPrefill(): Record<string, Scalar> {
    const out: Record<string, Scalar> = {};
    for (const [name, value] of Object.entries(this.state.whatIf.overlay)) {
      if (value !== null) {
        out[name] = value;
      }
    }
    return out;
  }
}
