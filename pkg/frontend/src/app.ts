/** Browser wiring for the what-if console: compose events for a running
 * case, watch per-goal fulfillment gauges, and explore hypothetical
 * attribute choices before committing them as the next event. */

import { ApiClient } from "./api.js";
import { renderCaseHeader, renderEvents, renderGauge, renderInlineError, renderRecommendation, renderWhatIfComparison } from "./render.js";
import { ConsoleStore } from "./state.js";
import type { Scalar } from "./types.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function parseAttributeLines(text: string): Record<string, Scalar> {
  const out: Record<string, Scalar> = {};
  for (const line of text.split("\n")) {
    const trimmed = line.trim();
    if (!trimmed) {
      continue;
    }
    const eq = trimmed.indexOf("=");
    if (eq < 1) {
      throw new Error(`attribute lines look like name=value, got: ${trimmed}`);
    }
    const name = trimmed.slice(0, eq).trim();
    const raw = trimmed.slice(eq + 1).trim();
    if (raw === "true" || raw === "false") {
      out[name] = raw === "true";
    } else if (raw !== "" && !Number.isNaN(Number(raw))) {
      out[name] = Number(raw);
    } else {
      out[name] = raw;
    }
  }
  return out;
}

function attributesToLines(attributes: Record<string, Scalar>): string {
  return Object.entries(attributes)
    .map(([k, v]) => `${k}=${v}`)
    .join("\n");
}

async function boot(): Promise<void> {
  const baseUrl =
    new URLSearchParams(window.location.search).get("service") ?? "http://127.0.0.1:8000";
  const api = new ApiClient(baseUrl);
  const store = new ConsoleStore(api);

  const [schema, goals] = await Promise.all([api.getSchema(), api.getGoals()]);
  const goalNames = Object.keys(goals.goals);
  store.setGoals(goalNames);

  const activityList = el<HTMLDataListElement>("activities");
  activityList.innerHTML = schema.activities
    .map((a) => `<option value="${a}"></option>`)
    .join("");
  el<HTMLElement>("goal-list").textContent = goalNames
    .map((name) => `${name} = ${goals.goals[name]}`)
    .join("; ");
  const whatIfGoal = el<HTMLSelectElement>("whatif-goal");
  whatIfGoal.innerHTML = goalNames.map((g) => `<option>${g}</option>`).join("");

  store.onChange((state) => {
    el("case-header").innerHTML = renderCaseHeader(state);
    el("event-list").innerHTML = renderEvents(state.events);
    el("ingest-error").innerHTML = renderInlineError(state.inlineError);
    el("gauges").innerHTML = goalNames
      .map((goal) => {
        const prediction = state.predictions[goal];
        const recommendation = state.recommendations[goal];
        return (
          `<section class="goal"><h3>${goal}</h3>` +
          (prediction ? renderGauge(prediction) : `<p class="muted">no query yet</p>`) +
          (recommendation ? renderRecommendation(recommendation) : "") +
          `</section>`
        );
      })
      .join("");
    const currentGoal = whatIfGoal.value || goalNames[0] || "";
    el("whatif-result").innerHTML = renderWhatIfComparison(
      state.predictions[currentGoal],
      state.whatIf.result,
    );
  });

  const caseInput = el<HTMLInputElement>("case-id");

  el<HTMLButtonElement>("load-case").addEventListener("click", async () => {
    try {
      await store.refreshAll(caseInput.value.trim());
    } catch (error) {
      el("ingest-error").innerHTML = renderInlineError(String(error));
    }
  });

  el<HTMLFormElement>("composer").addEventListener("submit", async (submitEvent) => {
    submitEvent.preventDefault();
    const caseId = caseInput.value.trim();
    const activity = el<HTMLInputElement>("activity").value.trim();
    const timestampField = el<HTMLInputElement>("timestamp").value.trim();
    const timestamp = timestampField || new Date().toISOString();
    try {
      const attributes = parseAttributeLines(el<HTMLTextAreaElement>("event-attrs").value);
      const caseAttributes = parseAttributeLines(el<HTMLTextAreaElement>("case-attrs").value);
      await store.submitEvent(caseId, {
        activity,
        timestamp,
        attributes,
        ...(Object.keys(caseAttributes).length ? { case_attributes: caseAttributes } : {}),
      });
      el<HTMLTextAreaElement>("case-attrs").value = "";
    } catch (error) {
      el("ingest-error").innerHTML = renderInlineError(String(error));
    }
  });

  el<HTMLFormElement>("whatif-form").addEventListener("submit", async (submitEvent) => {
    submitEvent.preventDefault();
    const caseId = caseInput.value.trim();
    try {
      const overlay = parseAttributeLines(el<HTMLTextAreaElement>("whatif-attrs").value);
      await store.runWhatIf(caseId, whatIfGoal.value, overlay);
    } catch (error) {
      el("ingest-error").innerHTML = renderInlineError(String(error));
    }
  });

  // The what-if answer feeds the next move: pre-fill the composer with the
  // overlay so the user can submit it as the next event's data.
  el<HTMLButtonElement>("whatif-apply").addEventListener("click", () => {
    el<HTMLTextAreaElement>("event-attrs").value = attributesToLines(store.whatIfPrefill());
    el<HTMLInputElement>("activity").focus();
  });
}

boot().catch((error) => {
  document.body.insertAdjacentHTML(
    "afterbegin",
    `<p class="inline-error">failed to reach the service: ${String(error)}</p>`,
  );
});
