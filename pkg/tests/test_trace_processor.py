import random

import pytest

from conftest import make_log, make_trace
from oracles import best_prefix
from promon.ltl import parse_formula
from promon.trace_processor import (
    END_OF_TRACE,
    DataSnapshot,
    Label,
    build_snapshot,
    filter_traces,
    label_snapshot,
    prefix_similarity,
    snapshots_to_csv,
)


class TestPrefixSimilarity:
    def test_identical_sequences(self):
        hist = make_trace("h", ["a", "b", "c"])
        cur = make_trace("c", ["a", "b", "c"])
        result = prefix_similarity(hist, cur)
        assert result.similarity == 1.0
        assert result.matched_prefix_len == 3

    def test_empty_current_matches_empty_prefix(self):
        hist = make_trace("h", ["a", "b"])
        cur = make_trace("c", [])
        result = prefix_similarity(hist, cur)
        assert result.matched_prefix_len == 0
        assert result.similarity == 1.0

    def test_partial_overlap_matches_oracle(self):
        hist = make_trace("h", ["a", "b", "c", "d"])
        cur = make_trace("c", ["a", "c"])
        result = prefix_similarity(hist, cur)
        expected_p, expected_sim = best_prefix(["a", "b", "c", "d"], ["a", "c"])
        assert (result.matched_prefix_len, result.similarity) == (expected_p, expected_sim)
        assert result.matched_prefix_len == 3
        assert result.similarity == pytest.approx(2 / 3)

    def test_oracle_agreement_randomized(self):
        rng = random.Random(5)
        alphabet = ["a", "b", "c"]
        for _ in range(200):
            hist = [rng.choice(alphabet) for _ in range(rng.randint(0, 12))]
            cur = [rng.choice(alphabet) for _ in range(rng.randint(0, 12))]
            got = prefix_similarity(make_trace("h", hist), make_trace("c", cur))
            want_p, want_sim = best_prefix(hist, cur)
            assert (got.matched_prefix_len, got.similarity) == (want_p, want_sim)

    def test_vector_path_matches_python_path(self):
        numpy = pytest.importorskip("numpy")
        assert numpy is not None
        from promon.trace_processor import _levenshtein_row_python, _levenshtein_row_vector

        rng = random.Random(31)
        alphabet = ["a", "b", "c", "d", "e", "f"]
        for _ in range(100):
            hist = [rng.choice(alphabet) for _ in range(rng.randint(0, 60))]
            cur = [rng.choice(alphabet) for _ in range(rng.randint(16, 60))]
            assert _levenshtein_row_vector(hist, cur) == _levenshtein_row_python(hist, cur)

    def test_long_trace_agreement_with_oracle(self):
        # long enough to exercise the vectorized row when numpy is present
        rng = random.Random(33)
        alphabet = [f"act-{i}" for i in range(20)]
        for _ in range(20):
            hist = [rng.choice(alphabet) for _ in range(rng.randint(20, 80))]
            cur = [rng.choice(alphabet) for _ in range(rng.randint(20, 80))]
            got = prefix_similarity(make_trace("h", hist), make_trace("c", cur))
            want_p, want_sim = best_prefix(hist, cur)
            assert (got.matched_prefix_len, got.similarity) == (want_p, want_sim)

    def test_own_prefix_is_perfect_match(self):
        activities = ["a", "b", "a", "c", "b"]
        hist = make_trace("h", activities)
        for k in range(len(activities) + 1):
            result = prefix_similarity(hist, make_trace("c", activities[:k]))
            assert result.similarity == 1.0
            assert result.matched_prefix_len == k

    def test_monotone_under_own_continuation(self):
        rng = random.Random(9)
        for _ in range(100):
            activities = [rng.choice("ab") for _ in range(rng.randint(1, 8))]
            hist = make_trace("h", activities)
            k = rng.randrange(len(activities))
            before = prefix_similarity(hist, make_trace("c", activities[:k])).similarity
            after = prefix_similarity(hist, make_trace("c", activities[: k + 1])).similarity
            assert after >= before


class TestFilterTraces:
    def test_zero_threshold_selects_everything(self):
        log = make_log([make_trace(f"t{i}", ["a", "b"]) for i in range(5)])
        results = filter_traces(log, make_trace("c", ["z"]), threshold=0.0, min_traces=1)
        assert len(results) == 5

    def test_fallback_floor_of_one(self):
        log = make_log([make_trace("t0", ["x", "y"]), make_trace("t1", ["x", "z"])])
        results = filter_traces(log, make_trace("c", ["q"]), threshold=1.0, min_traces=1)
        assert len(results) == 1

    def test_near_matches_come_first_with_min_trace_fallback(self):
        near = [make_trace(f"near{i:02d}", ["a", "b", "c"]) for i in range(10)]
        far = [make_trace(f"far{i:02d}", ["x", "y", "z"]) for i in range(90)]
        log = make_log(near + far)
        results = filter_traces(log, make_trace("c", ["a", "b", "c"]), threshold=0.8, min_traces=30)
        assert len(results) == 30
        assert [r.trace.case_id for r in results[:10]] == [f"near{i:02d}" for i in range(10)]
        assert all(r.similarity == 1.0 for r in results[:10])
        assert all(r.similarity < 0.8 for r in results[10:])

    def test_sorted_by_similarity_then_prefix_then_case_id(self):
        log = make_log(
            [
                make_trace("b", ["a", "b"]),
                make_trace("a", ["a", "b"]),
                make_trace("c", ["a"]),
            ]
        )
        results = filter_traces(log, make_trace("cur", ["a"]), threshold=0.0, min_traces=1)
        # all three contain the exact prefix [a]: similarity 1.0 at p=1
        assert [r.trace.case_id for r in results] == ["a", "b", "c"]
        assert [r.similarity for r in results] == [1.0, 1.0, 1.0]

    def test_output_size_floor(self):
        log = make_log([make_trace(f"t{i}", ["a"]) for i in range(4)])
        results = filter_traces(log, make_trace("c", ["zz"]), threshold=0.9, min_traces=10)
        assert len(results) == 4  # min(min_traces, |log|)

    def test_empty_log_rejected(self):
        with pytest.raises(ValueError):
            filter_traces(make_log([]), make_trace("c", ["a"]), 0.5, 1)


class TestBuildSnapshot:
    def test_prefix_zero_has_case_attributes_only(self):
        trace = make_trace("t", ["a", "b"], event_attrs=[{"x": 1}, {"y": 2}], case_attrs={"Age": 33})
        log = make_log([trace])
        snap = build_snapshot(trace, 0, log.schema)
        assert snap.features == {"Age": 33}

    def test_last_write_wins(self):
        trace = make_trace("t", ["e1", "e2"], event_attrs=[{"dose": 5}, {"dose": 7}])
        log = make_log([trace])
        assert build_snapshot(trace, 2, log.schema).features["dose"] == 7
        assert build_snapshot(trace, 1, log.schema).features["dose"] == 5

    def test_successive_events_accumulate(self, fig3_log):
        # Both the diagnosis and the therapy decision are visible afterwards.
        trace = fig3_log.traces[0]
        snap = build_snapshot(trace, 3, fig3_log.schema)
        assert snap.features == {
            "diagnosis": "Joint dislocation",
            "therapy": "Pharmacological therapy",
        }

    def test_next_activity_feature(self, fig3_log):
        trace = fig3_log.traces[0]
        snap = build_snapshot(trace, 2, fig3_log.schema, include_next_activity=True)
        assert snap.next_activity == "prescribe therapy"
        assert snap.as_features()["next_activity"] == "prescribe therapy"

    def test_next_activity_end_marker(self, fig3_log):
        trace = fig3_log.traces[0]
        snap = build_snapshot(trace, len(trace.events), fig3_log.schema, include_next_activity=True)
        assert snap.next_activity == END_OF_TRACE

    def test_prefix_out_of_range(self, fig3_log):
        with pytest.raises(ValueError):
            build_snapshot(fig3_log.traces[0], 99, fig3_log.schema)


class TestLabelSnapshot:
    def test_future_goal_satisfied(self):
        trace = make_trace("t", ["b", "a"])
        assert label_snapshot(trace, parse_formula("F a")) is Label.SATISFIED

    def test_globally_false_violated(self):
        trace = make_trace("t", ["a"])
        assert label_snapshot(trace, parse_formula("G false")) is Label.VIOLATED

    def test_diagnosis_never_followed_by_recovery(self):
        goal = parse_formula('G("diagnosis" -> F("recovered"))')
        trace = make_trace("t", ["lab tests", "diagnosis", "not recovered"])
        assert label_snapshot(trace, goal) is Label.VIOLATED


def test_snapshots_to_csv(fig3_log):
    snaps = [
        DataSnapshot(features={"diagnosis": "Arthrosis"}, label=Label.VIOLATED),
        DataSnapshot(features={"therapy": "Surgery"}, label=Label.SATISFIED),
    ]
    text = snapshots_to_csv(snaps, fig3_log.schema)
    lines = text.strip().splitlines()
    assert lines[0] == "diagnosis,therapy,label"
    assert lines[1] == "Arthrosis,,violated"
    assert lines[2] == ",Surgery,satisfied"
