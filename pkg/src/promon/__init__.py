"""Predictive monitoring of business processes.

Given a log of completed process executions and business goals in
finite-trace LTL, predict whether a running case will fulfill each goal and
recommend the attribute values or next activities that make fulfillment most
likely.
"""

from .dtree import Prediction, Recommendation
from .event_log import EventLog, ParseError, Schema, Trace, parse_csv, parse_xes
from .ltl import Formula, FormulaError, evaluate, parse_formula, pretty_print
from .monitor import MonitorVerdict, compile_monitor, monitor_verdict
from .predictor import Engine, EngineConfig
from .trace_processor import Label

__version__ = "0.1.0"

__all__ = [
    "Engine",
    "EngineConfig",
    "EventLog",
    "Formula",
    "FormulaError",
    "Label",
    "MonitorVerdict",
    "ParseError",
    "Prediction",
    "Recommendation",
    "Schema",
    "Trace",
    "compile_monitor",
    "evaluate",
    "monitor_verdict",
    "parse_csv",
    "parse_formula",
    "parse_xes",
    "pretty_print",
]
