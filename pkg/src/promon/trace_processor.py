"""Select similar historical traces and turn them into labeled snapshots.

A running case is compared against every completed trace by the edit
distance of their activity sequences; each selected trace contributes one
data snapshot (the attribute values visible up to its best-matching prefix)
labeled by whether the goal holds on the complete trace.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from enum import Enum

from .event_log import AttributeValue, EventLog, Schema, Trace, format_value
from .ltl import Formula, evaluate

try:  # optional fast path for long traces; results are bit-identical
    import numpy as _np
except ImportError:  # pragma: no cover
    _np = None

# Reserved next-activity marker for snapshots taken at the end of a trace.
END_OF_TRACE = "__end__"

NEXT_ACTIVITY = "next_activity"


class Label(Enum):
    SATISFIED = "satisfied"
    VIOLATED = "violated"


@dataclass
class SimilarityResult:
    trace: Trace
    matched_prefix_len: int
    similarity: float


@dataclass
class DataSnapshot:
    """Flat attribute assignment at a trace prefix; absent key = unknown."""

    features: dict[str, AttributeValue] = field(default_factory=dict)
    next_activity: str | None = None
    label: Label | None = None

    def as_features(self) -> dict[str, AttributeValue]:
        if self.next_activity is None:
            return dict(self.features)
        merged = dict(self.features)
        merged[NEXT_ACTIVITY] = self.next_activity
        return merged


def _levenshtein_row_python(historical: list[str], current: list[str]) -> list[int]:
    m = len(current)
    prev = list(range(m + 1))
    out = [prev[m]]
    for p in range(1, len(historical) + 1):
        row = [p] + [0] * m
        h = historical[p - 1]
        for j in range(1, m + 1):
            cost = 0 if h == current[j - 1] else 1
            row[j] = min(prev[j] + 1, row[j - 1] + 1, prev[j - 1] + cost)
        out.append(row[m])
        prev = row
    return out


def _levenshtein_row_vector(historical: list[str], current: list[str]) -> list[int]:
    """Same table, one vectorized row at a time. The left-to-right insertion
    dependency row[j] = min(t[j], row[j-1]+1) unrolls to a running minimum of
    t[i] - i, since insertions cost 1 per skipped column."""
    m = len(current)
    symbols: dict[str, int] = {}
    cur_ids = _np.array([symbols.setdefault(a, len(symbols)) for a in current], dtype=_np.int64)
    offsets = _np.arange(m + 1, dtype=_np.int64)
    prev = offsets.copy()
    out = [m]
    t = _np.empty(m + 1, dtype=_np.int64)
    for p, h in enumerate(historical, start=1):
        h_id = symbols.setdefault(h, len(symbols))
        t[0] = p
        _np.minimum(prev[1:] + 1, prev[:-1] + (cur_ids != h_id), out=t[1:])
        row = _np.minimum.accumulate(t - offsets) + offsets
        out.append(int(row[m]))
        prev = row
    return out


def _levenshtein_row(historical: list[str], current: list[str]) -> list[int]:
    """dist[p] = edit distance between historical[:p] and all of current."""
    if _np is not None and len(current) >= 16 and historical:
        return _levenshtein_row_vector(historical, current)
    return _levenshtein_row_python(historical, current)


def prefix_similarity(historical: Trace, current: Trace) -> SimilarityResult:
    """Best normalized edit-distance similarity over every prefix of the
    historical trace; ties go to the shortest prefix."""
    hist = historical.activities
    cur = current.activities
    distances = _levenshtein_row(hist, cur)
    best_p = 0
    best_sim = -1.0
    for p, dist in enumerate(distances):
        sim = 1.0 - dist / max(p, len(cur), 1)
        if sim > best_sim:
            best_sim = sim
            best_p = p
    return SimilarityResult(trace=historical, matched_prefix_len=best_p, similarity=best_sim)


def filter_traces(
    log: EventLog,
    current: Trace,
    threshold: float,
    min_traces: int,
) -> list[SimilarityResult]:
    """Historical traces at least as similar as the threshold, most similar
    first; topped up with the next-most-similar ones when fewer than
    min_traces qualify."""
    if not log.traces:
        raise ValueError("historical log is empty")
    results = [prefix_similarity(t, current) for t in log.traces]
    results.sort(key=lambda r: (-r.similarity, r.matched_prefix_len, r.trace.case_id))
    qualified = [r for r in results if r.similarity >= threshold]
    if len(qualified) >= min_traces:
        return qualified
    fallback = [r for r in results if r.similarity < threshold]
    return qualified + fallback[: min_traces - len(qualified)]


def build_snapshot(
    trace: Trace,
    prefix_len: int,
    schema: Schema,
    include_next_activity: bool = False,
) -> DataSnapshot:
    """Attribute values visible after the first prefix_len events: case
    attributes first, then event attributes folded in order (last write
    wins). Only schema attributes are kept."""
    if prefix_len < 0 or prefix_len > len(trace.events):
        raise ValueError(f"prefix_len {prefix_len} out of range for trace {trace.case_id!r}")
    features: dict[str, AttributeValue] = {}
    for name, value in trace.case_attributes.items():
        if name in schema.kinds:
            features[name] = value
    for event in trace.events[:prefix_len]:
        for name, value in event.attributes.items():
            if name in schema.kinds:
                features[name] = value
    next_activity = None
    if include_next_activity:
        if prefix_len == len(trace.events):
            next_activity = END_OF_TRACE
        else:
            next_activity = trace.events[prefix_len].activity
    return DataSnapshot(features=features, next_activity=next_activity)


def label_snapshot(trace: Trace, goal: Formula) -> Label:
    """Goal fulfillment on the complete trace."""
    return Label.SATISFIED if evaluate(goal, trace.activities) else Label.VIOLATED


def snapshots_to_csv(snapshots: list[DataSnapshot], schema: Schema) -> str:
    """Diagnostic dump: one row per snapshot, schema columns plus label."""
    names = sorted(schema.kinds)
    include_next = any(s.next_activity is not None for s in snapshots)
    header = list(names) + ([NEXT_ACTIVITY] if include_next else []) + ["label"]
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for snap in snapshots:
        row = []
        for name in names:
            value = snap.features.get(name)
            row.append("" if value is None else format_value(value))
        if include_next:
            row.append(snap.next_activity or "")
        row.append(snap.label.value if snap.label else "")
        writer.writerow(row)
    return out.getvalue()
