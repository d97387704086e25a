"""Decision tree induction with gain-ratio splits (C4.5 style).

Trees are grown greedily on labeled snapshots: nominal attributes split once
per path over their seen values, numeric attributes split on midpoint
thresholds and may recur. Rows with a missing value follow a dedicated
unknown branch. No post-pruning is applied, so induction is deterministic:
the same multiset of rows yields the identical tree regardless of row order.

Every leaf keeps its class support (correctly classified training rows) and
class probability correct / (correct + incorrect).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .event_log import (
    KIND_NOMINAL,
    KIND_NUMERIC,
    AttributeValue,
    format_value,
)
from .trace_processor import DataSnapshot, Label

Row = tuple[dict[str, AttributeValue], Label]


@dataclass
class Dataset:
    schema: dict[str, str]
    rows: list[Row]


@dataclass
class Leaf:
    label: Label
    correct: int
    incorrect: int

    @property
    def probability(self) -> float:
        return self.correct / (self.correct + self.incorrect)

    @property
    def total(self) -> int:
        return self.correct + self.incorrect


@dataclass
class NominalSplit:
    attribute: str
    branches: dict[AttributeValue, "Node"]
    unknown_branch: "Node | None" = None


@dataclass
class NumericSplit:
    attribute: str
    threshold: float
    le_branch: "Node | None" = None
    gt_branch: "Node | None" = None
    unknown_branch: "Node | None" = None


Node = Leaf | NominalSplit | NumericSplit


@dataclass
class Prediction:
    label: Label
    probability: float
    support: int
    trivial: bool = False


@dataclass
class Condition:
    attribute: str
    relation: str  # "=", "<=", ">", "unknown"
    value: AttributeValue | None = None

    def sort_key(self) -> tuple[str, str, str]:
        return (self.attribute, self.relation, "" if self.value is None else format_value(self.value))


@dataclass
class RecommendationEntry:
    conditions: list[Condition]
    label: Label
    probability: float
    support: int


@dataclass
class Recommendation:
    entries: list[RecommendationEntry] = field(default_factory=list)
    trivial: bool = False


def entropy(counts: tuple[int, int]) -> float:
    """Shannon entropy of a binary class distribution, in bits."""
    total = counts[0] + counts[1]
    if total == 0:
        raise ValueError("entropy of an empty distribution is undefined")
    result = 0.0
    for count in counts:
        if count:
            p = count / total
            result -= p * math.log2(p)
    return result


def _label_counts(rows: list[Row]) -> tuple[int, int]:
    satisfied = sum(1 for _, label in rows if label is Label.SATISFIED)
    return satisfied, len(rows) - satisfied


def _value_key(value: AttributeValue) -> str:
    return format_value(value)


_UNKNOWN_PART = "\x00unknown"


def _partition(
    rows: list[Row],
    attribute: str,
    kind: str,
    threshold: float | None,
) -> dict[object, list[Row]]:
    """Partition rows by attribute value; unknown values form their own part.

    Parts are keyed and ordered canonically so downstream float sums do not
    depend on row order.
    """
    parts: dict[object, list[Row]] = {}
    for row in rows:
        value = row[0].get(attribute)
        if kind == KIND_NUMERIC:
            if isinstance(value, (int, float)) and not isinstance(value, bool):
                key = "le" if value <= threshold else "gt"
            else:
                key = _UNKNOWN_PART
        else:
            key = _UNKNOWN_PART if value is None else value
        parts.setdefault(key, []).append(row)
    ordered_keys = sorted((k for k in parts if k != _UNKNOWN_PART), key=_value_key) if kind != KIND_NUMERIC else [
        k for k in ("le", "gt") if k in parts
    ]
    if _UNKNOWN_PART in parts:
        ordered_keys.append(_UNKNOWN_PART)
    return {k: parts[k] for k in ordered_keys}


def gain_ratio(dataset: Dataset, attribute: str, candidate_threshold: float | None = None) -> float:
    """Normalized information gain of splitting on the attribute (with the
    given threshold when numeric); 0 when the split carries no information."""
    kind = dataset.schema.get(attribute, KIND_NOMINAL)
    if (kind == KIND_NUMERIC) != (candidate_threshold is not None):
        raise ValueError("candidate_threshold is required exactly for numeric attributes")
    rows = dataset.rows
    parts = _partition(rows, attribute, kind, candidate_threshold)
    if len(parts) < 2:
        return 0.0
    total = len(rows)
    base = entropy(_label_counts(rows))
    remainder = 0.0
    split_info = 0.0
    for part_rows in parts.values():
        weight = len(part_rows) / total
        remainder += weight * entropy(_label_counts(part_rows))
        split_info -= weight * math.log2(weight)
    if split_info <= 0.0:
        return 0.0
    return (base - remainder) / split_info


def _numeric_candidates(rows: list[Row], attribute: str) -> list[float]:
    values = sorted(
        {
            row[0][attribute]
            for row in rows
            if isinstance(row[0].get(attribute), (int, float))
            and not isinstance(row[0].get(attribute), bool)
        }
    )
    return [(a + b) / 2 for a, b in zip(values, values[1:])]


def _majority_leaf(rows: list[Row]) -> Leaf:
    satisfied, violated = _label_counts(rows)
    # Tie resolves to Violated: the conservative class for alerting.
    label = Label.SATISFIED if satisfied > violated else Label.VIOLATED
    correct = satisfied if label is Label.SATISFIED else violated
    return Leaf(label=label, correct=correct, incorrect=len(rows) - correct)


def learn(dataset: Dataset, min_leaf: int = 2) -> Node:
    """Grow a tree by recursive gain-ratio splitting.

    Stops at a majority leaf when rows are single-class, fewer than
    2 * min_leaf rows remain, or no split has positive gain ratio. Split
    ties resolve to the lexicographically first attribute, then the smaller
    threshold.
    """
    if not dataset.rows:
        raise ValueError("cannot learn from an empty dataset")

    def grow(rows: list[Row]) -> Node:
        satisfied, violated = _label_counts(rows)
        if satisfied == 0 or violated == 0 or len(rows) < 2 * min_leaf:
            return _majority_leaf(rows)
        sub = Dataset(schema=dataset.schema, rows=rows)
        best_ratio = 0.0
        best: tuple[str, float | None] | None = None
        for attribute in sorted(dataset.schema):
            kind = dataset.schema[attribute]
            if kind == KIND_NUMERIC:
                for threshold in _numeric_candidates(rows, attribute):
                    ratio = gain_ratio(sub, attribute, threshold)
                    if ratio > best_ratio:
                        best_ratio = ratio
                        best = (attribute, threshold)
            else:
                ratio = gain_ratio(sub, attribute)
                if ratio > best_ratio:
                    best_ratio = ratio
                    best = (attribute, None)
        if best is None:
            return _majority_leaf(rows)
        attribute, threshold = best
        kind = dataset.schema[attribute]
        parts = _partition(rows, attribute, kind, threshold)
        unknown_rows = parts.pop(_UNKNOWN_PART, None)
        unknown_branch = grow(unknown_rows) if unknown_rows else None
        if kind == KIND_NUMERIC:
            return NumericSplit(
                attribute=attribute,
                threshold=threshold,
                le_branch=grow(parts["le"]) if "le" in parts else None,
                gt_branch=grow(parts["gt"]) if "gt" in parts else None,
                unknown_branch=unknown_branch,
            )
        return NominalSplit(
            attribute=attribute,
            branches={value: grow(part) for value, part in parts.items()},
            unknown_branch=unknown_branch,
        )

    return grow(list(dataset.rows))


def classify(tree: Node, snapshot: DataSnapshot) -> Prediction | None:
    """Walk the tree with the snapshot's features; None when the tree has no
    branch for an observed value (no prediction possible)."""
    features = snapshot.as_features()
    node = tree
    while not isinstance(node, Leaf):
        value = features.get(node.attribute)
        if isinstance(node, NumericSplit):
            if isinstance(value, (int, float)) and not isinstance(value, bool):
                node = node.le_branch if value <= node.threshold else node.gt_branch
            else:
                node = node.unknown_branch
        else:
            if value is None:
                node = node.unknown_branch
            else:
                node = node.branches.get(value)
        if node is None:
            return None
    return Prediction(
        label=node.label,
        probability=node.probability,
        support=node.correct,
    )


def prune_known(tree: Node | None, known: dict[str, AttributeValue | None]) -> Node | None:
    """Drop every branch inconsistent with the known attribute values.

    A known value of None means "known to be unknown" and keeps only the
    unknown branch. Splits on attributes absent from `known` keep all their
    surviving branches. Returns None when no leaf remains reachable.
    """
    if tree is None or isinstance(tree, Leaf):
        return tree
    if tree.attribute in known:
        value = known[tree.attribute]
        if value is None:
            branch = tree.unknown_branch
        elif isinstance(tree, NumericSplit):
            if isinstance(value, (int, float)) and not isinstance(value, bool):
                branch = tree.le_branch if value <= tree.threshold else tree.gt_branch
            else:
                branch = tree.unknown_branch
        else:
            branch = tree.branches.get(value)
        return prune_known(branch, known)
    unknown_branch = prune_known(tree.unknown_branch, known)
    if isinstance(tree, NumericSplit):
        le = prune_known(tree.le_branch, known)
        gt = prune_known(tree.gt_branch, known)
        if le is None and gt is None and unknown_branch is None:
            return None
        return NumericSplit(
            attribute=tree.attribute,
            threshold=tree.threshold,
            le_branch=le,
            gt_branch=gt,
            unknown_branch=unknown_branch,
        )
    branches = {}
    for value, child in tree.branches.items():
        pruned = prune_known(child, known)
        if pruned is not None:
            branches[value] = pruned
    if not branches and unknown_branch is None:
        return None
    return NominalSplit(attribute=tree.attribute, branches=branches, unknown_branch=unknown_branch)


def rank_leaves(tree: Node | None, target: Label = Label.SATISFIED) -> Recommendation:
    """Target-class leaves with their root-to-leaf conditions, best first:
    probability, then support, then condition order."""
    entries: list[RecommendationEntry] = []

    def collect(node: Node | None, conditions: list[Condition]) -> None:
        if node is None:
            return
        if isinstance(node, Leaf):
            if node.label is target:
                entries.append(
                    RecommendationEntry(
                        conditions=list(conditions),
                        label=node.label,
                        probability=node.probability,
                        support=node.correct,
                    )
                )
            return
        if isinstance(node, NumericSplit):
            collect(node.le_branch, conditions + [Condition(node.attribute, "<=", node.threshold)])
            collect(node.gt_branch, conditions + [Condition(node.attribute, ">", node.threshold)])
        else:
            for value in sorted(node.branches, key=_value_key):
                collect(node.branches[value], conditions + [Condition(node.attribute, "=", value)])
        collect(node.unknown_branch, conditions + [Condition(node.attribute, "unknown")])

    collect(tree, [])
    entries.sort(key=lambda e: (-e.probability, -e.support, tuple(c.sort_key() for c in e.conditions)))
    return Recommendation(entries=entries)


# --- Textual serialization ----------------------------------------------------

_INDENT = "  "


def format_tree(tree: Node | None) -> str:
    """Indented one-node-per-line text form with exact counts; parseable by
    :func:`parse_tree`."""
    lines: list[str] = []

    def emit(node: Node | None, depth: int) -> None:
        pad = _INDENT * depth
        if node is None:
            lines.append(pad + "none")
            return
        if isinstance(node, Leaf):
            lines.append(f"{pad}leaf {node.label.value} {node.correct} {node.incorrect}")
            return
        if isinstance(node, NumericSplit):
            lines.append(f"{pad}split {json.dumps(node.attribute)} <= {node.threshold!r}")
            for tag, child in (("le", node.le_branch), ("gt", node.gt_branch)):
                if child is not None:
                    lines.append(f"{pad}{_INDENT}{tag}:")
                    emit(child, depth + 2)
        else:
            lines.append(f"{pad}split {json.dumps(node.attribute)}")
            for value in sorted(node.branches, key=_value_key):
                lines.append(f"{pad}{_INDENT}value {json.dumps(value)}:")
                emit(node.branches[value], depth + 2)
        if node.unknown_branch is not None:
            lines.append(f"{pad}{_INDENT}unknown:")
            emit(node.unknown_branch, depth + 2)

    emit(tree, 0)
    return "\n".join(lines) + "\n"


def parse_tree(text: str) -> Node | None:
    """Inverse of :func:`format_tree`."""
    lines = [line for line in text.splitlines() if line.strip()]
    pos = 0

    def depth_of(line: str) -> int:
        return (len(line) - len(line.lstrip(" "))) // len(_INDENT)

    def parse_node(depth: int) -> Node | None:
        nonlocal pos
        line = lines[pos]
        if depth_of(line) != depth:
            raise ValueError(f"bad indentation at line {pos + 1}: {line!r}")
        body = line.strip()
        pos += 1
        if body == "none":
            return None
        if body.startswith("leaf "):
            label_text, correct, incorrect = body[5:].rsplit(" ", 2)[-3:]
            return Leaf(label=Label(label_text), correct=int(correct), incorrect=int(incorrect))
        if not body.startswith("split "):
            raise ValueError(f"unexpected node line: {body!r}")
        rest = body[6:]
        decoder = json.JSONDecoder()
        attribute, end = decoder.raw_decode(rest)
        rest = rest[end:].strip()
        threshold = None
        if rest:
            if not rest.startswith("<= "):
                raise ValueError(f"bad split line: {body!r}")
            threshold = float(rest[3:])
        branches: dict[AttributeValue, Node] = {}
        le = gt = unknown = None
        while pos < len(lines) and depth_of(lines[pos]) == depth + 1:
            tag = lines[pos].strip()
            pos += 1
            child = parse_node(depth + 2)
            if tag == "le:":
                le = child
            elif tag == "gt:":
                gt = child
            elif tag == "unknown:":
                unknown = child
            elif tag.startswith("value ") and tag.endswith(":"):
                branches[json.loads(tag[6:-1])] = child
            else:
                raise ValueError(f"unexpected branch line: {tag!r}")
        if threshold is not None:
            return NumericSplit(
                attribute=attribute, threshold=threshold, le_branch=le, gt_branch=gt, unknown_branch=unknown
            )
        return NominalSplit(attribute=attribute, branches=branches, unknown_branch=unknown)

    node = parse_node(0)
    if pos != len(lines):
        raise ValueError(f"trailing content at line {pos + 1}")
    return node
