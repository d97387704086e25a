"""Operational-support HTTP service: ingest a stream of events for running
cases and answer prediction / recommendation / what-if queries against the
loaded historical log. The case store is in-memory and append-only per case;
queries never mutate it."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

from fastapi import Body, FastAPI, HTTPException, Query
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from .dtree import Prediction, Recommendation
from .event_log import (
    KIND_BOOLEAN,
    KIND_NOMINAL,
    KIND_NUMERIC,
    AttributeValue,
    Event,
    ParseError,
    Trace,
    format_timestamp,
    parse_timestamp,
)
from .ltl import FormulaError, parse_formula, pretty_print
from .predictor import Engine, UnknownGoalError

SCHEMA_VERSION = 1


@dataclass
class RunningCase:
    case_id: str
    case_attributes: dict[str, AttributeValue] = field(default_factory=dict)
    events: list[Event] = field(default_factory=list)
    closed: bool = False

    def as_trace(self) -> Trace:
        return Trace(
            case_id=self.case_id,
            case_attributes=dict(self.case_attributes),
            events=list(self.events),
        )


class RejectedEvent(Exception):
    def __init__(self, reason: str, status: int = 409):
        super().__init__(reason)
        self.reason = reason
        self.status = status


def _check_scalar(value) -> AttributeValue:
    if isinstance(value, (str, bool, int, float)):
        if isinstance(value, float) and not math.isfinite(value):
            raise RejectedEvent("malformed", status=400)
        return value
    raise RejectedEvent("malformed", status=400)


def _typed_attributes(engine: Engine, raw: dict) -> dict[str, AttributeValue]:
    """Validate a JSON attribute map against the historical schema. Unknown
    attribute names are accepted but never become features; None values are
    dropped (unknown marker)."""
    if not isinstance(raw, dict):
        raise RejectedEvent("malformed", status=400)
    out: dict[str, AttributeValue] = {}
    kinds = engine.log.schema.kinds
    for name, value in raw.items():
        if value is None:
            continue
        value = _check_scalar(value)
        kind = kinds.get(name)
        if kind == KIND_NOMINAL and not isinstance(value, str):
            raise RejectedEvent("type_conflict")
        if kind == KIND_NUMERIC and (isinstance(value, bool) or not isinstance(value, (int, float))):
            raise RejectedEvent("type_conflict")
        if kind == KIND_BOOLEAN and not isinstance(value, bool):
            raise RejectedEvent("type_conflict")
        out[name] = value
    return out


def _prediction_json(prediction: Prediction | None) -> dict:
    if prediction is None:
        return {"prediction": None, "no_prediction": True}
    return {
        "prediction": {
            "class": prediction.label.value,
            "probability": prediction.probability,
            "support": prediction.support,
            "trivial": prediction.trivial,
        },
        "no_prediction": False,
    }


def _recommendation_json(rec: Recommendation) -> dict:
    return {
        "trivial": rec.trivial,
        "entries": [
            {
                "conditions": [
                    {"attribute": c.attribute, "relation": c.relation, "value": c.value}
                    for c in entry.conditions
                ],
                "class": entry.label.value,
                "probability": entry.probability,
                "support": entry.support,
            }
            for entry in rec.entries
        ],
    }


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="promon", version="0.1.0")
    state = {"engine": engine}
    cases: dict[str, RunningCase] = {}
    lock = threading.Lock()

    def respond(payload: dict, status: int = 200) -> JSONResponse:
        payload["schema_version"] = SCHEMA_VERSION
        return JSONResponse(payload, status_code=status)

    def get_case(case_id: str) -> RunningCase:
        with lock:
            case = cases.get(case_id)
            if case is None:
                raise HTTPException(status_code=404, detail="unknown case")
            return RunningCase(
                case_id=case.case_id,
                case_attributes=dict(case.case_attributes),
                events=list(case.events),
                closed=case.closed,
            )

    def current_engine() -> Engine:
        return state["engine"]

    @app.exception_handler(RejectedEvent)
    def rejected_handler(_, exc: RejectedEvent):
        return respond({"accepted": False, "reason": exc.reason}, status=exc.status)

    @app.exception_handler(StarletteHTTPException)
    def http_error_handler(_, exc: StarletteHTTPException):
        return respond({"error": str(exc.detail)}, status=exc.status_code)

    @app.post("/cases/{case_id}/events")
    def ingest_event(case_id: str, payload: dict = Body(...)):
        engine = current_engine()
        activity = payload.get("activity")
        raw_ts = payload.get("timestamp")
        if not isinstance(activity, str) or not activity or not isinstance(raw_ts, str):
            raise RejectedEvent("malformed", status=400)
        try:
            timestamp = parse_timestamp(raw_ts, "timestamp")
        except ParseError:
            raise RejectedEvent("malformed", status=400) from None
        attributes = _typed_attributes(engine, payload.get("attributes") or {})
        case_attributes = _typed_attributes(engine, payload.get("case_attributes") or {})
        with lock:
            case = cases.get(case_id)
            if case is None:
                case = RunningCase(case_id=case_id, case_attributes=case_attributes)
                cases[case_id] = case
            else:
                if case.closed:
                    raise RejectedEvent("case_closed")
                if case_attributes:
                    raise RejectedEvent("case_attributes_after_first_event")
                if case.events and timestamp < case.events[-1].timestamp:
                    raise RejectedEvent("out_of_order")
            case.events.append(Event(activity=activity, timestamp=timestamp, attributes=attributes))
            count = len(case.events)
        return respond({"accepted": True, "case_id": case_id, "events": count})

    @app.post("/cases/{case_id}/end")
    def end_case(case_id: str):
        with lock:
            case = cases.get(case_id)
            if case is None:
                raise HTTPException(status_code=404, detail="unknown case")
            case.closed = True
        return respond({"case_id": case_id, "closed": True})

    @app.get("/cases/{case_id}")
    def get_case_view(case_id: str):
        case = get_case(case_id)
        return respond(
            {
                "case_id": case.case_id,
                "closed": case.closed,
                "case_attributes": case.case_attributes,
                "events": [
                    {
                        "activity": e.activity,
                        "timestamp": format_timestamp(e.timestamp),
                        "attributes": e.attributes,
                    }
                    for e in case.events
                ],
            }
        )

    def _predict(case_id: str, goal: str, overlay: dict | None):
        engine = current_engine()
        case = get_case(case_id)
        trace = case.as_trace()
        try:
            verdict = engine.verdict(trace, goal)
            prediction = engine.predict(trace, goal, overlay=overlay)
        except UnknownGoalError:
            raise HTTPException(status_code=404, detail="unknown goal") from None
        body = {"case_id": case_id, "goal": goal, "verdict": verdict.value}
        body.update(_prediction_json(prediction))
        return respond(body)

    @app.get("/cases/{case_id}/prediction")
    def query_prediction(case_id: str, goal: str = Query(...)):
        return _predict(case_id, goal, overlay=None)

    @app.post("/cases/{case_id}/whatif")
    def what_if(case_id: str, goal: str = Query(...), payload: dict = Body(...)):
        engine = current_engine()
        raw = payload.get("attributes") or {}
        if not isinstance(raw, dict):
            raise RejectedEvent("malformed", status=400)
        overlay: dict[str, AttributeValue | None] = {
            name: None for name, value in raw.items() if value is None
        }
        overlay.update(_typed_attributes(engine, raw))
        return _predict(case_id, goal, overlay=overlay)

    @app.get("/cases/{case_id}/recommendation")
    def query_recommendation(case_id: str, goal: str = Query(...)):
        engine = current_engine()
        case = get_case(case_id)
        trace = case.as_trace()
        try:
            verdict = engine.verdict(trace, goal)
            rec = engine.recommend(trace, goal)
        except UnknownGoalError:
            raise HTTPException(status_code=404, detail="unknown goal") from None
        body = {"case_id": case_id, "goal": goal, "verdict": verdict.value}
        body.update(_recommendation_json(rec))
        return respond(body)

    @app.get("/goals")
    def get_goals():
        engine = current_engine()
        return respond({"goals": {name: pretty_print(f) for name, f in engine.goals.items()}})

    @app.put("/goals")
    def put_goals(payload: dict = Body(...)):
        raw = payload.get("goals", payload)
        if not isinstance(raw, dict) or not raw:
            raise HTTPException(status_code=400, detail="expected a goals map")
        parsed = {}
        for name, text in raw.items():
            if not isinstance(text, str):
                raise HTTPException(status_code=400, detail=f"goal {name!r}: formula must be text")
            try:
                parsed[name] = parse_formula(text)
            except FormulaError as exc:
                raise HTTPException(status_code=400, detail=f"goal {name!r}: {exc}") from None
        old = current_engine()
        state["engine"] = Engine(log=old.log, config=old.config, goals=parsed)
        return respond({"goals": {name: pretty_print(f) for name, f in parsed.items()}})

    @app.get("/schema")
    def get_schema():
        engine = current_engine()
        schema = engine.log.schema
        return respond(
            {
                "attributes": dict(sorted(schema.kinds.items())),
                "activities": sorted(schema.activities),
            }
        )

    @app.get("/health")
    def health():
        with lock:
            count = len(cases)
        return respond({"status": "ok", "cases": count})

    return app
