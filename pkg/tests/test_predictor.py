import pytest

from conftest import make_log, make_trace
from promon.dtree import Condition, format_tree
from promon.generator import generate_log
from promon.ltl import parse_formula
from promon.monitor import MonitorVerdict
from promon.predictor import Engine, EngineConfig, UnknownGoalError
from promon.trace_processor import Label

RECOVERY = parse_formula('F "recovered"')


def fig3_engine(fig3_log, **config):
    return Engine(log=fig3_log, config=EngineConfig(**config), goals={"recovery": RECOVERY})


class TestPredict:
    def test_trivial_satisfied_short_circuit(self, fig3_log):
        engine = fig3_engine(fig3_log)
        done = make_trace("done", ["lab tests", "diagnosis", "recovered"])
        prediction = engine.predict(done, "recovery")
        assert prediction.trivial
        assert prediction.label is Label.SATISFIED
        assert prediction.probability == 1.0
        assert prediction.support == len(fig3_log.traces)
        assert engine.stats.trees_learned == 0  # short-circuit learned nothing

    def test_worked_example_probability(self, fig3_log, fig3_running):
        engine = fig3_engine(fig3_log)
        prediction = engine.predict(fig3_running, "recovery")
        assert prediction is not None and not prediction.trivial
        assert prediction.label is Label.SATISFIED
        assert prediction.probability == 2 / 3
        assert prediction.support == 2
        assert engine.verdict(fig3_running, "recovery") is MonitorVerdict.TEMPORARILY_VIOLATED

    def test_planted_rule_is_recovered(self):
        log = generate_log(seed=11, traces=200, noise=0.0)
        engine = Engine(log=log, config=EngineConfig(), goals={"recovery": RECOVERY})
        current = make_trace(
            "q", ["lab tests", "diagnosis"], case_attrs={"Age": 40, "Diagnosis": "Arthrosis", "therapy": "Manipulation"}
        )
        prediction = engine.predict(current, "recovery")
        assert prediction.label is Label.SATISFIED
        assert prediction.probability >= 0.9

    def test_single_class_training_set(self):
        traces = [
            make_trace(f"t{i}", ["a", "recovered"], case_attrs={"k": "v"}) for i in range(5)
        ]
        engine = Engine(log=make_log(traces), goals={"recovery": RECOVERY})
        prediction = engine.predict(make_trace("q", ["a"]), "recovery")
        assert prediction.label is Label.SATISFIED
        assert prediction.probability == 1.0
        assert prediction.support == 5

    def test_probability_and_support_bounds(self, fig3_log, fig3_running):
        engine = fig3_engine(fig3_log)
        prediction = engine.predict(fig3_running, "recovery")
        assert 0.0 < prediction.probability <= 1.0
        assert prediction.support >= 1

    def test_unregistered_goal(self, fig3_log, fig3_running):
        engine = fig3_engine(fig3_log)
        with pytest.raises(UnknownGoalError):
            engine.predict(fig3_running, "nope")

    def test_empty_log_rejected(self):
        with pytest.raises(ValueError):
            Engine(log=make_log([]), goals={})


class TestRecommend:
    def test_worked_example_recommends_manipulation(self, fig3_log, fig3_undecided):
        engine = fig3_engine(fig3_log)
        rec = engine.recommend(fig3_undecided, "recovery")
        assert not rec.trivial
        top = rec.entries[0]
        assert top.conditions == [Condition("therapy", "=", "Manipulation")]
        assert top.probability == 1.0
        assert top.support == 3
        assert [e.probability for e in rec.entries] == [1.0, 2 / 3]

    def test_decided_goal_returns_trivial_empty(self, fig3_log):
        engine = fig3_engine(fig3_log)
        done = make_trace("done", ["recovered"])
        rec = engine.recommend(done, "recovery")
        assert rec.trivial and rec.entries == []

    def test_conditions_never_mention_known_attributes(self, fig3_log, fig3_running):
        engine = fig3_engine(fig3_log)
        known = {"diagnosis", "therapy"}
        rec = engine.recommend(fig3_running, "recovery")
        for entry in rec.entries:
            assert not known & {c.attribute for c in entry.conditions}

    def test_next_activity_recommendation(self):
        # planted rule: the goal holds iff activity b is executed right after a.
        traces = []
        for i in range(10):
            good = i % 2 == 0
            traces.append(
                make_trace(
                    f"t{i}",
                    ["a", "b", "recovered"] if good else ["a", "c", "not recovered"],
                )
            )
        engine = Engine(
            log=make_log(traces),
            config=EngineConfig(include_next_activity=True),
            goals={"recovery": RECOVERY},
        )
        rec = engine.recommend(make_trace("q", ["a"]), "recovery")
        top = rec.entries[0]
        assert top.conditions == [Condition("next_activity", "=", "b")]
        assert top.probability == 1.0


class TestDeterminism:
    def test_identical_engines_identical_outputs(self, fig3_log, fig3_running, fig3_undecided):
        left = fig3_engine(fig3_log)
        right = fig3_engine(fig3_log)
        assert left.predict(fig3_running, "recovery") == right.predict(fig3_running, "recovery")
        assert left.recommend(fig3_undecided, "recovery") == right.recommend(fig3_undecided, "recovery")
        key = next(iter(left._tree_cache))
        assert format_tree(left._tree_cache[key]) == format_tree(right._tree_cache[key])

    def test_tree_cache_reuses_identical_filter_sets(self, fig3_log, fig3_running):
        engine = fig3_engine(fig3_log)
        engine.predict(fig3_running, "recovery")
        engine.predict(fig3_running, "recovery")
        assert engine.stats.trees_learned == 1
        assert engine.stats.cache_hits == 1

    def test_overlay_does_not_mutate_inputs(self, fig3_log, fig3_running):
        engine = fig3_engine(fig3_log)
        before = [dict(e.attributes) for e in fig3_running.events]
        got = engine.predict(fig3_running, "recovery", overlay={"therapy": "Manipulation"})
        assert got.probability == 1.0
        assert [dict(e.attributes) for e in fig3_running.events] == before
