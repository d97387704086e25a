"""Per-query prediction pipeline: monitor short-circuit, similar-trace
filtering, snapshot labeling, tree induction, classification/ranking."""

from __future__ import annotations

from dataclasses import dataclass, field

from .dtree import (
    Dataset,
    Node,
    Prediction,
    Recommendation,
    classify,
    learn,
    prune_known,
    rank_leaves,
)
from .event_log import KIND_NOMINAL, AttributeValue, EventLog, Trace
from .ltl import Formula
from .monitor import MonitorAutomaton, MonitorVerdict, compile_monitor, monitor_verdict
from .trace_processor import (
    NEXT_ACTIVITY,
    DataSnapshot,
    Label,
    SimilarityResult,
    build_snapshot,
    filter_traces,
    label_snapshot,
)


@dataclass
class EngineConfig:
    """Tuning knobs; the defaults mirror the reference evaluation setup."""

    similarity_threshold: float = 0.8
    min_traces: int = 30
    include_next_activity: bool = False
    min_leaf: int = 2

    def __post_init__(self):
        if not 0.0 <= self.similarity_threshold <= 1.0:
            raise ValueError("similarity_threshold must be in [0, 1]")
        if self.min_traces < 1:
            raise ValueError("min_traces must be >= 1")
        if self.min_leaf < 1:
            raise ValueError("min_leaf must be >= 1")


class UnknownGoalError(KeyError):
    pass


@dataclass
class EngineStats:
    trees_learned: int = 0
    cache_hits: int = 0
    trivial_predictions: int = 0


@dataclass
class Engine:
    """Immutable prediction engine over a historical log and registered goals.

    Queries are pure; per-(goal, filtered-set) trees are memoized, which
    never changes outputs because induction is deterministic.
    """

    log: EventLog
    config: EngineConfig = field(default_factory=EngineConfig)
    goals: dict[str, Formula] = field(default_factory=dict)
    monitors: dict[str, MonitorAutomaton] = field(default_factory=dict)
    stats: EngineStats = field(default_factory=EngineStats)
    _tree_cache: dict = field(default_factory=dict, repr=False)
    _filter_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self.log.traces:
            raise ValueError("historical log is empty")
        for name in list(self.goals):
            if name not in self.monitors:
                self._compile(name)

    def _compile(self, name: str) -> None:
        alphabet = self.log.schema.activities or frozenset({"__none__"})
        self.monitors[name] = compile_monitor(self.goals[name], alphabet)

    def register_goal(self, name: str, goal: Formula) -> None:
        self.goals[name] = goal
        self._compile(name)

    def _goal(self, name: str) -> Formula:
        if name not in self.goals:
            raise UnknownGoalError(name)
        return self.goals[name]

    def verdict(self, current: Trace, goal_name: str) -> MonitorVerdict:
        self._goal(goal_name)
        return monitor_verdict(self.monitors[goal_name], current.activities)

    def _feature_schema(self) -> dict[str, str]:
        schema = dict(self.log.schema.kinds)
        if self.config.include_next_activity:
            schema[NEXT_ACTIVITY] = KIND_NOMINAL
        return schema

    def _training_tree(self, goal_name: str, selected: list[SimilarityResult]) -> Node:
        key = (goal_name, tuple((r.trace.case_id, r.matched_prefix_len) for r in selected))
        cached = self._tree_cache.get(key)
        if cached is not None:
            self.stats.cache_hits += 1
            return cached
        goal = self.goals[goal_name]
        rows = []
        for result in selected:
            snapshot = build_snapshot(
                result.trace,
                result.matched_prefix_len,
                self.log.schema,
                include_next_activity=self.config.include_next_activity,
            )
            snapshot.label = label_snapshot(result.trace, goal)
            rows.append((snapshot.as_features(), snapshot.label))
        tree = learn(Dataset(schema=self._feature_schema(), rows=rows), min_leaf=self.config.min_leaf)
        self.stats.trees_learned += 1
        self._tree_cache[key] = tree
        return tree

    def _query_snapshot(self, current: Trace) -> DataSnapshot:
        return build_snapshot(current, len(current.events), self.log.schema)

    def _select(self, current: Trace) -> list[SimilarityResult]:
        # Similarity depends only on the activity sequence, so queries with
        # the same prefix share one filtering pass.
        key = tuple(current.activities)
        cached = self._filter_cache.get(key)
        if cached is None:
            cached = filter_traces(
                self.log, current, self.config.similarity_threshold, self.config.min_traces
            )
            self._filter_cache[key] = cached
        return cached

    def predict(
        self,
        current: Trace,
        goal_name: str,
        overlay: dict[str, AttributeValue | None] | None = None,
    ) -> Prediction | None:
        """Predict goal fulfillment for the running case.

        A permanent monitor verdict short-circuits to a trivial prediction
        whose support is the size of the filtered training set. `overlay`
        adds hypothetical attribute values to the query snapshot (a None
        value marks the attribute as unknown); the case itself is untouched.
        """
        verdict = self.verdict(current, goal_name)
        selected = self._select(current)
        if verdict.permanent:
            self.stats.trivial_predictions += 1
            label = (
                Label.SATISFIED
                if verdict is MonitorVerdict.PERMANENTLY_SATISFIED
                else Label.VIOLATED
            )
            return Prediction(label=label, probability=1.0, support=len(selected), trivial=True)
        tree = self._training_tree(goal_name, selected)
        snapshot = self._query_snapshot(current)
        if overlay:
            for name, value in overlay.items():
                if value is None:
                    snapshot.features.pop(name, None)
                else:
                    snapshot.features[name] = value
        return classify(tree, snapshot)

    def recommend(
        self,
        current: Trace,
        goal_name: str,
        target: Label = Label.SATISFIED,
    ) -> Recommendation:
        """Rank attribute conditions that most favor the target outcome.

        Only attributes still unknown in the query appear in conditions; on
        a permanently decided goal the recommendation is empty and flagged
        trivial.
        """
        verdict = self.verdict(current, goal_name)
        if verdict.permanent:
            return Recommendation(entries=[], trivial=True)
        selected = self._select(current)
        tree = self._training_tree(goal_name, selected)
        known = dict(self._query_snapshot(current).features)
        pruned = prune_known(tree, known)
        if pruned is None:
            return Recommendation(entries=[])
        return rank_leaves(pruned, target)
