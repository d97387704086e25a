"""Event log model and parsers (CSV and an XES subset).

An event log is a collection of completed process executions (traces), each
an ordered list of events with typed case- and event-level attributes. The
attribute namespace is flat: a case attribute and an event attribute with the
same name share one schema entry.
"""

from __future__ import annotations

import csv
import io
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from datetime import datetime, timezone

# Attribute values are plain Python scalars; a missing/unknown value is the
# absence of the key in an attribute map (never None inside a map).
AttributeValue = str | int | float | bool

KIND_NOMINAL = "nominal"
KIND_NUMERIC = "numeric"
KIND_BOOLEAN = "boolean"


class ParseError(ValueError):
    """Raised when an event log file is malformed."""


@dataclass
class Event:
    activity: str
    timestamp: datetime
    attributes: dict[str, AttributeValue] = field(default_factory=dict)


@dataclass
class Trace:
    """One process execution: case id, case attributes, ordered events.

    Events are sorted by timestamp with ties kept in input order. Parsed
    traces always hold at least one event; partial traces built at runtime
    may be empty.
    """

    case_id: str
    case_attributes: dict[str, AttributeValue] = field(default_factory=dict)
    events: list[Event] = field(default_factory=list)

    @property
    def activities(self) -> list[str]:
        return [e.activity for e in self.events]


@dataclass
class Schema:
    """Attribute kinds plus the set of observed activity names."""

    kinds: dict[str, str] = field(default_factory=dict)
    activities: frozenset[str] = frozenset()

    def kind_of(self, name: str) -> str | None:
        return self.kinds.get(name)


@dataclass
class EventLog:
    traces: list[Trace]
    schema: Schema

    def __len__(self) -> int:
        return len(self.traces)


def parse_timestamp(text: str, where: str) -> datetime:
    """Parse an ISO-8601 timestamp; naive values are taken as UTC."""
    raw = text.strip()
    if raw.endswith("Z") or raw.endswith("z"):
        raw = raw[:-1] + "+00:00"
    try:
        ts = datetime.fromisoformat(raw)
    except ValueError:
        raise ParseError(f"{where}: unparseable timestamp {text!r}") from None
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts


def format_timestamp(ts: datetime) -> str:
    return ts.isoformat()


def format_value(value: AttributeValue) -> str:
    """Canonical text form of a value (used by CSV output and demotion)."""
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def _scalar_from_text(raw: str) -> AttributeValue:
    """Most specific typed reading of a raw CSV field (never unknown)."""
    low = raw.lower()
    if low == "true":
        return True
    if low == "false":
        return False
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        num = float(raw)
    except ValueError:
        return raw
    if not math.isfinite(num):
        return raw
    return num


def _kind_of_value(value: AttributeValue) -> str:
    if isinstance(value, bool):
        return KIND_BOOLEAN
    if isinstance(value, (int, float)):
        return KIND_NUMERIC
    return KIND_NOMINAL


def infer_schema(log: EventLog) -> Schema:
    """Infer one kind per attribute from the values observed in the log.

    All-numeric attributes are numeric, all-boolean stay boolean, anything
    mixed demotes to nominal. Attributes never observed with a concrete
    value default to nominal. Deterministic and order-independent.
    """
    seen: dict[str, set[str]] = {}
    activities: set[str] = set()
    for trace in log.traces:
        for name, value in trace.case_attributes.items():
            seen.setdefault(name, set()).add(_kind_of_value(value))
        for event in trace.events:
            activities.add(event.activity)
            for name, value in event.attributes.items():
                seen.setdefault(name, set()).add(_kind_of_value(value))
    for name in log.schema.kinds:
        seen.setdefault(name, set())
    kinds: dict[str, str] = {}
    for name, observed in seen.items():
        if len(observed) == 1:
            kinds[name] = next(iter(observed))
        else:
            kinds[name] = KIND_NOMINAL
    return Schema(kinds=kinds, activities=frozenset(activities))


def _normalize_values(log: EventLog) -> None:
    """Coerce every stored value to its attribute's inferred kind."""

    def fix(attrs: dict[str, AttributeValue]) -> None:
        for name, value in attrs.items():
            kind = log.schema.kinds.get(name, KIND_NOMINAL)
            if kind == KIND_NOMINAL and not isinstance(value, str):
                attrs[name] = format_value(value)

    for trace in log.traces:
        fix(trace.case_attributes)
        for event in trace.events:
            fix(event.attributes)


def _finish_log(traces: list[Trace], declared: dict[str, str] | None = None) -> EventLog:
    for trace in traces:
        trace.events.sort(key=lambda e: e.timestamp)  # stable: ties keep input order
    log = EventLog(traces=traces, schema=Schema(kinds=dict(declared or {})))
    log.schema = infer_schema(log)
    _normalize_values(log)
    return log


# --- CSV ------------------------------------------------------------------

REQUIRED_COLUMNS = ("case_id", "activity", "timestamp")
CASE_PREFIX = "case:"


def parse_csv(content: bytes | str) -> EventLog:
    """Parse the events-CSV format: one event per row, grouped by case_id.

    Columns prefixed ``case:`` are case attributes and must hold the same
    value on every row of a case (or be empty); all other columns are event
    attributes. An empty field is the unknown marker.
    """
    text = content.decode("utf-8") if isinstance(content, bytes) else content
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("line 1: empty file, expected a header row") from None
    for required in REQUIRED_COLUMNS:
        if required not in header:
            raise ParseError(f"line 1: missing required column {required!r}")
    col = {name: i for i, name in enumerate(header)}
    case_cols = [(name[len(CASE_PREFIX):], i) for name, i in col.items() if name.startswith(CASE_PREFIX)]
    event_cols = [
        (name, i) for name, i in col.items()
        if name not in REQUIRED_COLUMNS and not name.startswith(CASE_PREFIX)
    ]

    order: list[str] = []
    traces: dict[str, Trace] = {}
    case_value_line: dict[tuple[str, str], int] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise ParseError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        case_id = row[col["case_id"]].strip()
        activity = row[col["activity"]]
        if not case_id:
            raise ParseError(f"line {lineno}: empty case_id")
        if not activity:
            raise ParseError(f"line {lineno}: empty activity")
        ts = parse_timestamp(row[col["timestamp"]], f"line {lineno}")
        if case_id not in traces:
            traces[case_id] = Trace(case_id=case_id)
            order.append(case_id)
        trace = traces[case_id]
        for name, i in case_cols:
            raw = row[i]
            if raw == "":
                continue
            value = _scalar_from_text(raw)
            if name in trace.case_attributes:
                if trace.case_attributes[name] != value:
                    first = case_value_line[(case_id, name)]
                    raise ParseError(
                        f"line {lineno}: case attribute {name!r} of case {case_id!r} "
                        f"conflicts with value set on line {first}"
                    )
            else:
                trace.case_attributes[name] = value
                case_value_line[(case_id, name)] = lineno
        attributes: dict[str, AttributeValue] = {}
        for name, i in event_cols:
            raw = row[i]
            if raw == "":
                continue
            attributes[name] = _scalar_from_text(raw)
        trace.events.append(Event(activity=activity, timestamp=ts, attributes=attributes))

    declared = {name: KIND_NOMINAL for name, _ in case_cols}
    declared.update({name: KIND_NOMINAL for name, _ in event_cols})
    return _finish_log([traces[c] for c in order], declared)


def to_csv(log: EventLog) -> str:
    """Serialize to the events-CSV format; reparses to an equal log."""
    case_attr_names = sorted({n for t in log.traces for n in t.case_attributes})
    event_attr_names = sorted({n for t in log.traces for e in t.events for n in e.attributes})
    header = list(REQUIRED_COLUMNS) + [CASE_PREFIX + n for n in case_attr_names] + event_attr_names
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for trace in log.traces:
        for event in trace.events:
            row = [trace.case_id, event.activity, format_timestamp(event.timestamp)]
            for name in case_attr_names:
                value = trace.case_attributes.get(name)
                row.append("" if value is None else format_value(value))
            for name in event_attr_names:
                value = event.attributes.get(name)
                row.append("" if value is None else format_value(value))
            writer.writerow(row)
    return out.getvalue()


# --- XES subset -------------------------------------------------------------

_XES_SCALARS = ("string", "int", "float", "boolean", "date")


def _strip_ns(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _xes_value(elem: ET.Element, where: str) -> tuple[str, AttributeValue] | None:
    tag = _strip_ns(elem.tag)
    if tag not in _XES_SCALARS:
        return None
    key = elem.get("key")
    raw = elem.get("value")
    if key is None or raw is None:
        return None
    if tag == "string":
        return key, raw
    if tag == "int":
        try:
            return key, int(raw)
        except ValueError:
            raise ParseError(f"{where}: bad int value {raw!r} for {key!r}") from None
    if tag == "float":
        try:
            num = float(raw)
        except ValueError:
            raise ParseError(f"{where}: bad float value {raw!r} for {key!r}") from None
        if not math.isfinite(num):
            raise ParseError(f"{where}: non-finite float for {key!r}")
        return key, num
    if tag == "boolean":
        return key, raw.strip().lower() == "true"
    # date: keep non-timestamp dates as nominal ISO text
    return key, raw


def parse_xes(content: bytes | str) -> EventLog:
    """Parse the XES subset: trace attributes become case attributes,
    ``concept:name``/``time:timestamp`` of each event become activity and
    timestamp, all other recognized scalar attributes are kept. Traces
    without events are dropped.
    """
    data = content.encode("utf-8") if isinstance(content, str) else content
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise ParseError(f"not well-formed XML: {exc}") from None
    traces: list[Trace] = []
    seen_ids: set[str] = set()
    trace_elems = [el for el in root.iter() if _strip_ns(el.tag) == "trace"]
    for t_index, trace_elem in enumerate(trace_elems):
        case_attributes: dict[str, AttributeValue] = {}
        events: list[Event] = []
        for child in trace_elem:
            tag = _strip_ns(child.tag)
            if tag == "event":
                e_index = len(events)
                where = f"trace {t_index} event {e_index}"
                attrs: dict[str, AttributeValue] = {}
                for attr_elem in child:
                    parsed = _xes_value(attr_elem, where)
                    if parsed:
                        attrs[parsed[0]] = parsed[1]
                activity = attrs.pop("concept:name", None)
                if not isinstance(activity, str) or not activity:
                    raise ParseError(f"{where}: missing concept:name")
                raw_ts = attrs.pop("time:timestamp", None)
                if raw_ts is None:
                    raise ParseError(f"{where}: missing time:timestamp")
                ts = parse_timestamp(str(raw_ts), where)
                events.append(Event(activity=activity, timestamp=ts, attributes=attrs))
            else:
                parsed = _xes_value(child, f"trace {t_index}")
                if parsed:
                    case_attributes[parsed[0]] = parsed[1]
        if not events:
            continue
        case_id = case_attributes.pop("concept:name", None)
        case_id = str(case_id) if case_id is not None else f"trace-{t_index}"
        if case_id in seen_ids:
            raise ParseError(f"trace {t_index}: duplicate case id {case_id!r}")
        seen_ids.add(case_id)
        traces.append(Trace(case_id=case_id, case_attributes=case_attributes, events=events))
    return _finish_log(traces)
