/** Display formatting. Probabilities are truncated (never rounded up) to two
 * decimals, with a single trailing zero trimmed: 2/3 renders as 0.66 and a
 * certain prediction as 1.0. */

export function formatProbability(value: number): string {
  const truncated = Math.floor(value * 100 + 1e-9) / 100;
  const text = truncated.toFixed(2);
  return text.endsWith("0") ? text.slice(0, -1) : text;
}

const VERDICT_LABELS: Record<string, string> = {
  permanently_satisfied: "Permanently satisfied",
  permanently_violated: "Permanently violated",
  temporarily_satisfied: "Temporarily satisfied",
  temporarily_violated: "Temporarily violated",
};

export function formatVerdict(verdict: string): string {
  return VERDICT_LABELS[verdict] ?? verdict;
}

export function formatClass(klass: string): string {
  return klass === "satisfied" ? "Satisfied" : "Violated";
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
