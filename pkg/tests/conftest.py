import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from promon.event_log import Event, EventLog, Schema, Trace, infer_schema

BASE_TIME = datetime(2011, 1, 3, 10, 0, 0, tzinfo=timezone.utc)


def make_trace(case_id, activities, event_attrs=None, case_attrs=None, start=BASE_TIME):
    """Trace with one event per activity, a minute apart."""
    events = []
    for k, activity in enumerate(activities):
        attrs = dict(event_attrs[k]) if event_attrs else {}
        events.append(Event(activity=activity, timestamp=start + timedelta(minutes=k), attributes=attrs))
    return Trace(case_id=case_id, case_attributes=dict(case_attrs or {}), events=events)


def make_log(traces):
    log = EventLog(traces=list(traces), schema=Schema())
    log.schema = infer_schema(log)
    return log


# The worked example: a tree over diagnosis and therapy where the
# (Joint dislocation, Pharmacological therapy) leaf classifies satisfied
# with 2 correct and 1 incorrect training snapshot.
FIG3_ROWS = [
    ("Joint dislocation", "Pharmacological therapy", True),
    ("Joint dislocation", "Pharmacological therapy", True),
    ("Joint dislocation", "Pharmacological therapy", False),
    ("Joint dislocation", "Surgery", False),
    ("Joint dislocation", "Manipulation", True),
    ("Joint dislocation", "Manipulation", True),
    ("Joint dislocation", "Manipulation", True),
    ("Arthrosis", "Pharmacological therapy", False),
    ("Arthrosis", "Manipulation", False),
    ("Dupuytren's contracture", "Surgery", True),
    ("Dupuytren's contracture", "Pharmacological therapy", True),
    ("Osteoarthritis", "Surgery", False),
    ("Osteoarthritis", "Pharmacological therapy", False),
    ("Slipped disc", "Manipulation", True),
    ("Slipped disc", "Pharmacological therapy", True),
]


def fig3_trace(case_id, diagnosis, therapy, recovers, start=BASE_TIME):
    outcome = "recovered" if recovers else "not recovered"
    return make_trace(
        case_id,
        ["lab tests", "diagnosis", "prescribe therapy", outcome],
        event_attrs=[{}, {"diagnosis": diagnosis}, {"therapy": therapy}, {}],
        start=start,
    )


@pytest.fixture
def fig3_log():
    traces = [
        fig3_trace(f"h{i:02d}", diagnosis, therapy, recovers, start=BASE_TIME + timedelta(days=i))
        for i, (diagnosis, therapy, recovers) in enumerate(FIG3_ROWS)
    ]
    return make_log(traces)


@pytest.fixture
def fig3_running():
    """Running case right after the therapy decision of the worked example."""
    return make_trace(
        "running",
        ["lab tests", "diagnosis", "prescribe therapy"],
        event_attrs=[{}, {"diagnosis": "Joint dislocation"}, {"therapy": "Pharmacological therapy"}],
    )


@pytest.fixture
def fig3_undecided():
    """Running case with a diagnosis but no therapy chosen yet."""
    return make_trace(
        "undecided",
        ["lab tests", "diagnosis", "prescribe therapy"],
        event_attrs=[{}, {"diagnosis": "Joint dislocation"}, {}],
    )
