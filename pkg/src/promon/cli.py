"""promon command line: evaluate, predict, generate, serve.

Exit codes: 0 success, 1 input parse errors, 2 evaluation/runtime errors.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from pathlib import Path

from . import evaluation
from .dtree import Recommendation
from .event_log import EventLog, ParseError, parse_csv, parse_xes
from .evaluation import (
    ALL_POINTS,
    EvalPoint,
    EvaluationError,
    chronological_split,
    render_report_csv,
    render_report_text,
    render_roc_csv,
    replay_evaluate,
    validate_conservation,
)
from .formatting import format_probability
from .generator import DEFAULT_RULE, generate_log
from .ltl import Formula, FormulaError, parse_formula
from .predictor import Engine, EngineConfig


def _atomic_write(path: Path, content: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(content)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_log(path: str) -> EventLog:
    data = Path(path).read_bytes()
    if path.endswith(".xes") or data.lstrip()[:1] == b"<":
        return parse_xes(data)
    return parse_csv(data)


def load_goals(path: str) -> dict[str, Formula]:
    """Goals file: one `name = formula` per line, '#' starts a comment."""
    goals: dict[str, Formula] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"{path}:{lineno}: expected 'name = formula'")
        name, text = line.split("=", 1)
        name = name.strip()
        if not name:
            raise ParseError(f"{path}:{lineno}: empty goal name")
        try:
            goals[name] = parse_formula(text.strip())
        except FormulaError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from None
    if not goals:
        raise ParseError(f"{path}: no goals defined")
    return goals


def load_partial_case(path: str):
    """Events-CSV restricted to one case; a row with empty activity and
    timestamp carries case attributes only, so a case can be described
    before its first event."""
    from .event_log import CASE_PREFIX, REQUIRED_COLUMNS, Trace, _scalar_from_text
    import csv as _csv
    import io as _io

    text = Path(path).read_text(encoding="utf-8")
    rows = list(_csv.reader(_io.StringIO(text)))
    if not rows:
        raise ParseError(f"{path}: empty case file")
    header = rows[0]
    attr_only: list[list[str]] = []
    event_rows: list[list[str]] = []
    col = {name: i for i, name in enumerate(header)}
    for required in REQUIRED_COLUMNS:
        if required not in col:
            raise ParseError(f"{path}: missing required column {required!r}")
    for row in rows[1:]:
        if not row:
            continue
        if not row[col["activity"]] and not row[col["timestamp"]]:
            attr_only.append(row)
        else:
            event_rows.append(row)
    if event_rows:
        out = _io.StringIO()
        writer = _csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(event_rows)
        log = parse_csv(out.getvalue())
        if len(log.traces) != 1:
            raise ParseError(f"{path}: expected exactly one case, found {len(log.traces)}")
        trace = log.traces[0]
    else:
        trace = Trace(case_id="", case_attributes={}, events=[])
    for row in attr_only:
        if not trace.case_id:
            trace.case_id = row[col["case_id"]] or "query"
        for name, i in col.items():
            if name.startswith(CASE_PREFIX) and i < len(row) and row[i]:
                trace.case_attributes.setdefault(name[len(CASE_PREFIX):], _scalar_from_text(row[i]))
    if not trace.case_id:
        trace.case_id = "query"
    return trace


def _parse_points(text: str) -> list[EvalPoint]:
    points = []
    for part in text.split(","):
        part = part.strip().lower()
        if not part:
            continue
        try:
            points.append(EvalPoint(part))
        except ValueError:
            raise argparse.ArgumentTypeError(f"unknown evaluation point {part!r}") from None
    return points or list(ALL_POINTS)


def cmd_evaluate(args) -> int:
    log = load_log(args.log)
    goals = load_goals(args.goals)
    config = EngineConfig(
        similarity_threshold=args.threshold,
        min_traces=args.min_traces,
        include_next_activity=args.next_activity,
    )
    train, test = chronological_split(log, args.split)
    progress = None
    if sys.stderr.isatty():
        progress = lambda done, total: print(
            f"\revaluated {done}/{total} test traces", end="", file=sys.stderr, flush=True
        )
    result = replay_evaluate(train, test, goals, config, points=args.points, progress=progress)
    if progress is not None:
        print(file=sys.stderr)
    validate_conservation(result)
    filter_mode = args.filter
    out_dir = Path(args.out)
    _atomic_write(out_dir / "report.csv", render_report_csv(result, filter_mode))
    _atomic_write(out_dir / "report.txt", render_report_text(result, filter_mode))
    _atomic_write(out_dir / "roc.csv", render_roc_csv(result))
    sys.stdout.write(render_report_text(result, filter_mode))
    return 0


def _print_recommendation(rec: Recommendation) -> None:
    if rec.trivial:
        print("recommendation: none (goal already decided)")
        return
    if not rec.entries:
        print("recommendation: none")
        return
    print("recommendation:")
    for entry in rec.entries[:5]:
        conds = ", ".join(
            f"{c.attribute} {c.relation} {c.value}" if c.relation != "unknown" else f"{c.attribute} unknown"
            for c in entry.conditions
        )
        print(
            f"  {conds or '(any)'} -> {entry.label.value}"
            f" (probability {format_probability(entry.probability)}, support {entry.support})"
        )


def cmd_predict(args) -> int:
    log = load_log(args.log)
    goals = load_goals(args.goals)
    case = load_partial_case(args.case)
    config = EngineConfig(
        similarity_threshold=args.threshold,
        min_traces=args.min_traces,
        include_next_activity=args.next_activity,
    )
    engine = Engine(log=log, config=config, goals=goals)
    for name in goals:
        verdict = engine.verdict(case, name)
        prediction = engine.predict(case, name)
        print(f"goal {name}: verdict {verdict.value}")
        if prediction is None:
            print("  no prediction possible (unseen attribute value)")
        else:
            flag = ", trivial" if prediction.trivial else ""
            print(
                f"  predicted {prediction.label.value}"
                f" (probability {format_probability(prediction.probability)},"
                f" support {prediction.support}{flag})"
            )
        if args.recommend:
            _print_recommendation(engine.recommend(case, name))
    return 0


def cmd_generate(args) -> int:
    from .event_log import to_csv

    log = generate_log(seed=args.seed, traces=args.traces, noise=args.noise, rule=args.rule)
    _atomic_write(Path(args.out), to_csv(log))
    print(f"wrote {len(log.traces)} traces to {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    log_path = args.log or os.environ.get("PROMON_LOG")
    goals_path = args.goals or os.environ.get("PROMON_GOALS")
    if not log_path or not goals_path:
        raise ParseError("serve needs --log and --goals (or PROMON_LOG / PROMON_GOALS)")
    log = load_log(log_path)
    goals = load_goals(goals_path)
    config = EngineConfig(
        similarity_threshold=float(os.environ.get("PROMON_THRESHOLD", args.threshold)),
        min_traces=int(os.environ.get("PROMON_MIN_TRACES", args.min_traces)),
    )
    app = create_app(Engine(log=log, config=config, goals=goals))
    port = int(os.environ.get("PROMON_PORT", args.port))
    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="promon", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--log", required=True, help="historical event log (.csv or .xes)")
        p.add_argument("--goals", required=True, help="goals file: name = formula per line")
        p.add_argument("--threshold", type=float, default=0.8, help="similarity threshold")
        p.add_argument("--min-traces", type=int, default=30, dest="min_traces")
        p.add_argument(
            "--next-activity",
            action="store_true",
            dest="next_activity",
            help="use the next activity as a learning feature",
        )

    p_eval = sub.add_parser("evaluate", help="replay-evaluate goals on a log")
    common(p_eval)
    p_eval.add_argument("--split", type=float, default=0.8, help="chronological train fraction")
    p_eval.add_argument("--points", type=_parse_points, default=list(ALL_POINTS))
    p_eval.add_argument(
        "--filter",
        choices=[evaluation.FILTER_PROB_ABOVE_MEAN, evaluation.FILTER_SUPPORT_ABOVE_MEDIAN],
        default=None,
    )
    p_eval.add_argument("--out", required=True, help="report output directory")
    p_eval.set_defaults(func=cmd_evaluate)

    p_pred = sub.add_parser("predict", help="one-shot prediction for a partial case")
    common(p_pred)
    p_pred.add_argument("--case", required=True, help="partial trace file (events CSV)")
    p_pred.add_argument("--recommend", action="store_true")
    p_pred.set_defaults(func=cmd_predict)

    p_gen = sub.add_parser("generate", help="write a synthetic planted-rule log")
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--traces", type=int, default=500)
    p_gen.add_argument("--noise", type=float, default=0.1)
    p_gen.add_argument("--rule", default=DEFAULT_RULE)
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_generate)

    p_serve = sub.add_parser("serve", help="run the HTTP prediction service")
    p_serve.add_argument("--log", help="historical event log (.csv or .xes)")
    p_serve.add_argument("--goals", help="goals file: name = formula per line")
    p_serve.add_argument("--threshold", type=float, default=0.8)
    p_serve.add_argument("--min-traces", type=int, default=30, dest="min_traces")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, FormulaError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (EvaluationError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
