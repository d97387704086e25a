"""Deterministic synthetic event logs shaped like a medical-treatment
process, with a planted attribute-to-outcome rule and a noise rate.

Used as the desk-scale stand-in for real hospital logs in evaluation and
tests: which therapy a patient receives decides (up to noise) whether the
trace ends with a recovery.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

from .event_log import Event, EventLog, Schema, Trace, infer_schema

DIAGNOSES = [
    "Joint dislocation",
    "Arthrosis",
    "Dupuytren's contracture",
    "Osteoarthritis",
    "Slipped disc",
]

THERAPIES = [
    ("Manipulation", 0.5),
    ("Pharmacological therapy", 0.3),
    ("Surgery", 0.2),
]

DOSES = [5, 7, 9]

RECOVERED = "recovered"
NOT_RECOVERED = "not recovered"

DEFAULT_RULE = "therapy=Manipulation"


@dataclass
class PlantedRule:
    attribute: str
    value: str

    @classmethod
    def parse(cls, text: str) -> "PlantedRule":
        if "=" not in text:
            raise ValueError(f"rule must look like attribute=value, got {text!r}")
        attribute, value = text.split("=", 1)
        return cls(attribute=attribute.strip(), value=value.strip())


def _weighted_choice(rng: random.Random, options):
    roll = rng.random()
    acc = 0.0
    for value, weight in options:
        acc += weight
        if roll < acc:
            return value
    return options[-1][0]


def generate_log(
    seed: int,
    traces: int,
    noise: float = 0.1,
    rule: str = DEFAULT_RULE,
) -> EventLog:
    """Generate `traces` cases; a trace recovers iff the planted rule matches
    its attributes, except that a `noise` fraction of outcomes is flipped."""
    if traces < 1:
        raise ValueError("need at least one trace")
    if not 0.0 <= noise <= 1.0:
        raise ValueError("noise must be in [0, 1]")
    planted = PlantedRule.parse(rule)
    rng = random.Random(seed)
    base = datetime(2011, 1, 3, 8, 0, 0, tzinfo=timezone.utc)
    out: list[Trace] = []
    for i in range(traces):
        age = rng.randrange(20, 100, 20)
        diagnosis = rng.choice(DIAGNOSES)
        therapy = _weighted_choice(rng, THERAPIES)
        # A dose is prescribed only under pharmacological therapy.
        dose = rng.choice(DOSES) if therapy == "Pharmacological therapy" else None
        checkups = rng.randrange(0, 3)
        attrs = {"Age": age, "Diagnosis": diagnosis, "therapy": therapy, "dose": dose}
        if planted.attribute not in attrs:
            raise ValueError(f"rule attribute {planted.attribute!r} is not generated")
        recovers = str(attrs[planted.attribute]) == planted.value
        if rng.random() < noise:
            recovers = not recovers
        start = base + timedelta(days=i)
        step = timedelta(hours=1)
        activities = (
            ["lab tests", "diagnosis", "prescribe therapy", "administer medicine"]
            + ["checkup"] * checkups
            + [RECOVERED if recovers else NOT_RECOVERED, "discharge"]
        )
        events = []
        for k, activity in enumerate(activities):
            event_attrs = {}
            if activity == "administer medicine" and dose is not None:
                event_attrs["dose"] = dose
            events.append(Event(activity=activity, timestamp=start + k * step, attributes=event_attrs))
        out.append(
            Trace(
                case_id=f"case-{i:04d}",
                case_attributes={"Age": age, "Diagnosis": diagnosis, "therapy": therapy},
                events=events,
            )
        )
    log = EventLog(traces=out, schema=Schema())
    log.schema = infer_schema(log)
    return log
