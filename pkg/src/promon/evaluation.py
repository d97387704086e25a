"""Replay-based evaluation: chronological split, per-point predictions on
replayed test traces, confusion counts, ROC-space metrics, and the
probability/support confidence filters with their prediction loss."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from enum import Enum

from .event_log import EventLog, Trace, infer_schema
from .formatting import format_metric
from .ltl import Formula, evaluate
from .predictor import Engine, EngineConfig
from .trace_processor import Label


class EvalPoint(Enum):
    START = "start"
    EARLY = "early"
    INTERMEDIATE = "intermediate"


ALL_POINTS = (EvalPoint.START, EvalPoint.EARLY, EvalPoint.INTERMEDIATE)

FILTER_PROB_ABOVE_MEAN = "prob-mean"
FILTER_SUPPORT_ABOVE_MEDIAN = "support-median"


class EvaluationError(RuntimeError):
    pass


@dataclass
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0
    no_prediction: int = 0

    @property
    def queries(self) -> int:
        return self.tp + self.fp + self.fn + self.tn + self.no_prediction

    def add(self, other: "ConfusionCounts") -> None:
        self.tp += other.tp
        self.fp += other.fp
        self.fn += other.fn
        self.tn += other.tn
        self.no_prediction += other.no_prediction


@dataclass
class Metrics:
    tpr: float
    fpr: float
    ppv: float
    f1: float
    acc: float
    loss: float | None = None


def compute_metrics(c: ConfusionCounts, loss: float | None = None) -> Metrics:
    """ROC-space metrics from confusion counts; a zero denominator yields 0."""

    def ratio(num: int, den: int) -> float:
        return num / den if den else 0.0

    tpr = ratio(c.tp, c.tp + c.fn)
    fpr = ratio(c.fp, c.fp + c.tn)
    ppv = ratio(c.tp, c.tp + c.fp)
    f1 = 2 * ppv * tpr / (ppv + tpr) if (ppv + tpr) else 0.0
    acc = ratio(c.tp + c.tn, c.tp + c.fp + c.tn + c.fn)
    return Metrics(tpr=tpr, fpr=fpr, ppv=ppv, f1=f1, acc=acc, loss=loss)


def chronological_split(log: EventLog, train_fraction: float = 0.8) -> tuple[EventLog, EventLog]:
    """Order traces by first-event time (ties by case id) and cut at
    floor(n * fraction)."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    if len(log.traces) < 2:
        raise ValueError("need at least 2 traces to split")
    ordered = sorted(log.traces, key=lambda t: (t.events[0].timestamp, t.case_id))
    cut = int(len(ordered) * train_fraction)
    train = EventLog(traces=ordered[:cut], schema=log.schema)
    test = EventLog(traces=ordered[cut:], schema=log.schema)
    train.schema = infer_schema(train)
    test.schema = infer_schema(test)
    return train, test


def evaluation_points(trace: Trace, kinds=ALL_POINTS) -> dict[EvalPoint, int]:
    """Number of events visible to the predictor at each requested point."""
    n = len(trace.events)
    if n < 1:
        raise ValueError("trace has no events")
    index = {
        EvalPoint.START: 1,
        EvalPoint.EARLY: max(1, n // 4),
        EvalPoint.INTERMEDIATE: max(1, n // 2),
    }
    return {kind: index[kind] for kind in kinds}


@dataclass
class PredictionRecord:
    goal: str
    point: EvalPoint
    case_id: str
    gold: Label
    predicted: Label | None
    probability: float | None
    support: int | None
    trivial: bool


@dataclass
class EvalResult:
    records: list[PredictionRecord] = field(default_factory=list)

    def counts(self, goal: str, point: EvalPoint | None = None) -> ConfusionCounts:
        """Confusion counts for one goal at one point (None = all points)."""
        c = ConfusionCounts()
        for r in self.records:
            if r.goal != goal or (point is not None and r.point != point):
                continue
            if r.predicted is None:
                c.no_prediction += 1
            elif r.predicted is Label.SATISFIED:
                if r.gold is Label.SATISFIED:
                    c.tp += 1
                else:
                    c.fp += 1
            else:
                if r.gold is Label.SATISFIED:
                    c.fn += 1
                else:
                    c.tn += 1
        return c

    def goals(self) -> list[str]:
        seen: list[str] = []
        for r in self.records:
            if r.goal not in seen:
                seen.append(r.goal)
        return seen

    def points(self) -> list[EvalPoint]:
        seen: list[EvalPoint] = []
        for r in self.records:
            if r.point not in seen:
                seen.append(r.point)
        return seen


def _truncated(trace: Trace, visible: int) -> Trace:
    return Trace(
        case_id=trace.case_id,
        case_attributes=trace.case_attributes,
        events=trace.events[:visible],
    )


def replay_evaluate(
    train: EventLog,
    test: EventLog,
    goals: dict[str, Formula],
    config: EngineConfig,
    points=ALL_POINTS,
    progress=None,
) -> EvalResult:
    """Replay each test trace, asking for a prediction at every evaluation
    point, and score against the goal's truth on the complete trace.
    `progress(done, total)` is called after each replayed trace when given."""
    if not train.traces:
        raise ValueError("training log is empty")
    engine = Engine(log=train, config=config, goals=dict(goals))
    result = EvalResult()
    for done, trace in enumerate(test.traces, start=1):
        point_index = evaluation_points(trace, points)
        full = trace.activities
        for goal_name, goal in goals.items():
            gold = Label.SATISFIED if evaluate(goal, full) else Label.VIOLATED
            for point in points:
                partial = _truncated(trace, point_index[point])
                try:
                    prediction = engine.predict(partial, goal_name)
                except Exception as exc:
                    raise EvaluationError(
                        f"prediction failed for case {trace.case_id!r}, goal {goal_name!r}, "
                        f"point {point.value}: {exc}"
                    ) from exc
                result.records.append(
                    PredictionRecord(
                        goal=goal_name,
                        point=point,
                        case_id=trace.case_id,
                        gold=gold,
                        predicted=None if prediction is None else prediction.label,
                        probability=None if prediction is None else prediction.probability,
                        support=None if prediction is None else prediction.support,
                        trivial=bool(prediction and prediction.trivial),
                    )
                )
        if progress is not None:
            progress(done, len(test.traces))
    return result


def _scored(records: list[PredictionRecord]) -> list[PredictionRecord]:
    return [r for r in records if r.predicted is not None]


def apply_filter(records: list[PredictionRecord], mode: str) -> tuple[ConfusionCounts, float]:
    """Keep only confident predictions; returns the filtered counts and the
    fraction of predictions discarded (LOSS).

    prob-mean keeps class probability >= the group mean; support-median
    keeps support >= the (lower) median support.
    """
    scored = _scored(records)
    if not scored:
        raise ValueError("no predictions to filter")
    if mode == FILTER_PROB_ABOVE_MEAN:
        cutoff = sum(r.probability for r in scored) / len(scored)
        kept = [r for r in scored if r.probability >= cutoff]
    elif mode == FILTER_SUPPORT_ABOVE_MEDIAN:
        supports = sorted(r.support for r in scored)
        cutoff = supports[(len(supports) - 1) // 2]
        kept = [r for r in scored if r.support >= cutoff]
    else:
        raise ValueError(f"unknown filter mode {mode!r}")
    counts = ConfusionCounts()
    for r in kept:
        if r.predicted is Label.SATISFIED:
            if r.gold is Label.SATISFIED:
                counts.tp += 1
            else:
                counts.fp += 1
        else:
            if r.gold is Label.SATISFIED:
                counts.fn += 1
            else:
                counts.tn += 1
    loss = (len(scored) - len(kept)) / len(scored)
    return counts, loss


# --- Reports ------------------------------------------------------------------


def _report_rows(result: EvalResult, filter_mode: str | None) -> list[dict]:
    rows = []
    for goal in result.goals():
        for point in result.points():
            c = result.counts(goal, point)
            rows.append({"goal": goal, "row": point.value, "counts": c, "metrics": compute_metrics(c)})
        all_counts = result.counts(goal)
        rows.append({"goal": goal, "row": "all", "counts": all_counts, "metrics": compute_metrics(all_counts)})
        if filter_mode:
            goal_records = [r for r in result.records if r.goal == goal]
            filtered, loss = apply_filter(goal_records, filter_mode)
            rows.append(
                {
                    "goal": goal,
                    "row": f"filter:{filter_mode}",
                    "counts": filtered,
                    "metrics": compute_metrics(filtered, loss),
                }
            )
    return rows


def validate_conservation(result: EvalResult) -> None:
    """Every (goal, point) cell must conserve queries: the four confusion
    counts plus no-predictions equal the number of issued queries."""
    for goal in result.goals():
        for point in result.points():
            cell = result.counts(goal, point)
            issued = sum(1 for r in result.records if r.goal == goal and r.point == point)
            if cell.queries != issued:
                raise EvaluationError(
                    f"count conservation violated for goal {goal!r} at {point.value}: "
                    f"{cell.queries} != {issued}"
                )


def render_report_csv(result: EvalResult, filter_mode: str | None = None) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(
        ["goal", "row", "tp", "fp", "fn", "tn", "no_prediction", "tpr", "fpr", "ppv", "f1", "acc", "loss"]
    )
    for row in _report_rows(result, filter_mode):
        c, m = row["counts"], row["metrics"]
        writer.writerow(
            [
                row["goal"],
                row["row"],
                c.tp,
                c.fp,
                c.fn,
                c.tn,
                c.no_prediction,
                repr(m.tpr),
                repr(m.fpr),
                repr(m.ppv),
                repr(m.f1),
                repr(m.acc),
                "" if m.loss is None else repr(m.loss),
            ]
        )
    return out.getvalue()


def render_report_text(result: EvalResult, filter_mode: str | None = None) -> str:
    lines = []
    header = f"{'':24} {'TP':>5} {'FP':>5} {'FN':>5} {'TN':>5} {'TPR':>6} {'FPR':>6} {'PPV':>6} {'F1':>6} {'ACC':>6} {'LOSS':>6}"
    current_goal = None
    for row in _report_rows(result, filter_mode):
        if row["goal"] != current_goal:
            current_goal = row["goal"]
            lines.append(f"goal: {current_goal}")
            lines.append(header)
        c, m = row["counts"], row["metrics"]
        lines.append(
            f"{row['row']:24} {c.tp:>5} {c.fp:>5} {c.fn:>5} {c.tn:>5} "
            f"{format_metric(m.tpr):>6} {format_metric(m.fpr):>6} {format_metric(m.ppv):>6} "
            f"{format_metric(m.f1):>6} {format_metric(m.acc):>6} "
            f"{format_metric(m.loss) if m.loss is not None else '-':>6}"
        )
    return "\n".join(lines) + "\n"


def render_roc_csv(result: EvalResult) -> str:
    """(FPR, TPR) per goal and evaluation point, for plotting."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["goal", "point", "fpr", "tpr"])
    for goal in result.goals():
        for point in result.points():
            m = compute_metrics(result.counts(goal, point))
            writer.writerow([goal, point.value, repr(m.fpr), repr(m.tpr)])
    return out.getvalue()
