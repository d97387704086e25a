"""Display-side number formatting. Values are kept at full precision
internally; reports and UIs truncate instead of rounding."""

from __future__ import annotations

import math

# Absorbs float error of exactly-representable decimals before flooring.
_EPS = 1e-9


def truncate(value: float, places: int) -> float:
    scale = 10**places
    return math.floor(value * scale + _EPS) / scale


def format_metric(value: float) -> str:
    """Three-decimal truncated form used in evaluation tables."""
    return f"{truncate(value, 3):.3f}"


def format_probability(value: float) -> str:
    """Two-decimal truncated form, with a single trailing zero trimmed
    (1.0 rather than 1.00, but 0.66 stays 0.66)."""
    text = f"{truncate(value, 2):.2f}"
    return text[:-1] if text.endswith("0") else text
