/** Pure HTML renderers over console state. Every number shown here is taken
 * verbatim from a service response held in the state (formatting is the only
 * transformation applied). */

import { escapeHtml, formatClass, formatProbability, formatVerdict } from "./format.js";
import type { ConsoleState } from "./state.js";
import type {
  EventView,
  PredictionResponse,
  RecommendationCondition,
  RecommendationResponse,
} from "./types.js";

function supportBar(support: number, scale: number): string {
  const width = scale > 0 ? Math.max(2, Math.round((support / scale) * 100)) : 0;
  return `<span class="bar" style="width:${width}px" title="support ${support}"></span>`;
}

export function renderGauge(body: PredictionResponse): string {
  const verdict = `<span class="verdict ${escapeHtml(body.verdict)}">${formatVerdict(body.verdict)}</span>`;
  if (body.no_prediction || body.prediction === null) {
    return `<div class="gauge">${verdict}<span class="noprediction">no prediction possible</span></div>`;
  }
  const p = body.prediction;
  const trivial = p.trivial ? ` <span class="trivial">trivial</span>` : "";
  return (
    `<div class="gauge">${verdict}` +
    `<span class="klass ${p.class}">${formatClass(p.class)}</span>` +
    `<span class="probability">${formatProbability(p.probability)}</span>` +
    `<span class="support">support ${p.support}</span>${trivial}</div>`
  );
}

function renderCondition(condition: RecommendationCondition): string {
  if (condition.relation === "unknown") {
    return `${escapeHtml(condition.attribute)} unknown`;
  }
  return `${escapeHtml(condition.attribute)} ${escapeHtml(condition.relation)} ${escapeHtml(String(condition.value))}`;
}

export function renderRecommendation(body: RecommendationResponse): string {
  if (body.trivial) {
    return `<p class="muted">Goal already decided; nothing to steer.</p>`;
  }
  if (body.entries.length === 0) {
    return `<p class="muted">No recommendation available.</p>`;
  }
  const scale = Math.max(...body.entries.map((e) => e.support));
  const items = body.entries
    .map((entry) => {
      const conditions = entry.conditions.length
        ? entry.conditions.map(renderCondition).join(", ")
        : "(no further choice needed)";
      return (
        `<li><code>${conditions}</code> &rarr; ${formatClass(entry.class)} ` +
        `<strong>${formatProbability(entry.probability)}</strong> ` +
        `${supportBar(entry.support, scale)} <small>support ${entry.support}</small></li>`
      );
    })
    .join("");
  return `<ol class="recommendation">${items}</ol>`;
}

export function renderEvents(events: EventView[]): string {
  if (events.length === 0) {
    return `<p class="muted">No events yet.</p>`;
  }
  const rows = events
    .map((event, index) => {
      const attrs = Object.entries(event.attributes)
        .map(([k, v]) => `${escapeHtml(k)}=${escapeHtml(String(v))}`)
        .join(", ");
      return (
        `<tr><td>${index + 1}</td><td>${escapeHtml(event.activity)}</td>` +
        `<td>${escapeHtml(event.timestamp)}</td><td>${attrs}</td></tr>`
      );
    })
    .join("");
  return (
    `<table class="events"><thead><tr><th>#</th><th>activity</th><th>timestamp</th>` +
    `<th>attributes</th></tr></thead><tbody>${rows}</tbody></table>`
  );
}

export function renderWhatIfComparison(
  current: PredictionResponse | undefined,
  hypothetical: PredictionResponse | null,
): string {
  if (!hypothetical) {
    return `<p class="muted">Fill the overlay and ask "what if".</p>`;
  }
  const side = (label: string, body: PredictionResponse | undefined): string => {
    if (!body) {
      return `<div class="side"><h4>${label}</h4><p class="muted">n/a</p></div>`;
    }
    if (body.no_prediction || body.prediction === null) {
      return `<div class="side"><h4>${label}</h4><p class="noprediction">no prediction possible</p></div>`;
    }
    return (
      `<div class="side"><h4>${label}</h4>` +
      `<span class="klass ${body.prediction.class}">${formatClass(body.prediction.class)}</span> ` +
      `<strong class="probability">${formatProbability(body.prediction.probability)}</strong></div>`
    );
  };
  return `<div class="whatif-compare">${side("Current", current)}${side("Hypothetical", hypothetical)}</div>`;
}

export function renderInlineError(error: string | null): string {
  if (!error) {
    return "";
  }
  return `<p class="inline-error" role="alert">rejected: ${escapeHtml(error)}</p>`;
}

export function renderCaseHeader(state: ConsoleState): string {
  if (!state.caseId) {
    return `<p class="muted">No case loaded.</p>`;
  }
  const attrs = Object.entries(state.caseAttributes)
    .map(([k, v]) => `<span class="attr">${escapeHtml(k)}=${escapeHtml(String(v))}</span>`)
    .join(" ");
  const closed = state.closed ? ` <span class="closed">closed</span>` : "";
  return `<h3>Case ${escapeHtml(state.caseId)}${closed}</h3><div class="case-attrs">${attrs}</div>`;
}
