import random

import pytest
from hypothesis import given, settings, strategies as st

from hmi_adapt.events import ContextAttributes, ElementVocabulary
from hmi_adapt.markov import (
    ContextModelStore,
    build_context_store,
    load_snapshot,
    model_from_doc,
    model_to_doc,
    pad_history,
    recommend_top_k,
    save_snapshot,
    select_model,
    store_from_doc,
    store_to_doc,
    train_markov,
    transition_probability,
)
from helpers import (
    OP_EVENING,
    OP_MORNING,
    SUP_MORNING,
    make_sequence,
    make_vocabulary,
    random_corpus,
)
from oracles import oracle_counts, oracle_top_k


class TestPadHistory:
    def test_short_history_padded_with_begin(self):
        assert pad_history(["x"], 3, "b") == ("b", "b", "x")

    def test_exact_length_unchanged(self):
        assert pad_history(["x", "y"], 2, "b") == ("x", "y")

    def test_long_history_truncated_to_suffix(self):
        assert pad_history(["x", "y", "z"], 2, "b") == ("y", "z")

    def test_empty_history_is_all_begin(self):
        assert pad_history([], 2, "b") == ("b", "b")


class TestTraining:
    def test_counts_on_hand_fixture(self):
        corpus = [
            make_sequence(["b", "x", "y", "e"]),
            make_sequence(["b", "x", "z", "e"], start_ms=10_000),
        ]
        model = train_markov(corpus, 2)
        assert model.counts == {
            ("b", "b"): {"x": 2},
            ("b", "x"): {"y": 1, "z": 1},
            ("x", "y"): {"e": 1},
            ("x", "z"): {"e": 1},
        }
        assert model.state_totals[("b", "x")] == 2
        assert model.total_transitions == 6
        assert model.popularity == {"x": 2, "y": 1, "z": 1, "e": 2}

    def test_lower_orders_match_direct_counting(self):
        rng = random.Random(4)
        v = make_vocabulary(action_count=5)
        corpus = random_corpus(rng, v, 60)
        raw = [list(seq.events) for seq in corpus]
        model = train_markov(corpus, 3, v)
        level = model
        for order in (3, 2, 1):
            assert level.order == order
            assert level.counts == oracle_counts(raw, order, v.begin_marker)
            level = level.lower
        assert level is None

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            train_markov([], 1)

    def test_bad_order_rejected(self):
        with pytest.raises(ValueError, match="order"):
            train_markov([make_sequence(["b", "x", "y", "e"])], 0)

    def test_vocabulary_inferred_from_corpus(self):
        corpus = [make_sequence(["b", "x", "y", "e"])]
        model = train_markov(corpus, 1)
        assert model.vocabulary.begin_marker == "b"
        assert model.vocabulary.end_marker == "e"
        assert model.vocabulary.elements == frozenset({"b", "x", "y", "e"})

    def test_probability_and_errors(self):
        corpus = [
            make_sequence(["b", "x", "y", "e"]),
            make_sequence(["b", "x", "z", "e"], start_ms=10_000),
        ]
        model = train_markov(corpus, 1)
        assert transition_probability(model, ["x"], "y") == 0.5
        assert transition_probability(model, ["x"], "e") == 0.0
        assert transition_probability(model, ["y"], "e") == 1.0
        with pytest.raises(ValueError, match="length"):
            transition_probability(model, ["x", "y"], "e")

    def test_rows_are_stochastic(self):
        rng = random.Random(11)
        v = make_vocabulary(action_count=6)
        model = train_markov(random_corpus(rng, v, 80), 2, v)
        level = model
        while level is not None:
            for state, dist in level.counts.items():
                total = sum(dist[nxt] / level.state_totals[state] for nxt in dist)
                assert total == pytest.approx(1.0, abs=1e-12)
            level = level.lower


class TestRecommend:
    def deterministic_model(self):
        # b -> x -> y -> e with no alternatives
        return train_markov([make_sequence(["b", "x", "y", "e"])], 1)

    def test_deterministic_chain_top1(self):
        model = self.deterministic_model()
        rec = recommend_top_k(model, ["x"], 1)
        assert [(i.element, i.score, i.rank) for i in rec.items] == [("y", 1.0, 1)]

    def test_k_larger_than_candidates(self):
        model = self.deterministic_model()
        rec = recommend_top_k(model, ["x"], 5)
        assert len(rec) == 1

    def test_ranks_are_consecutive_from_one(self):
        rng = random.Random(5)
        v = make_vocabulary(action_count=6)
        model = train_markov(random_corpus(rng, v, 40), 2, v)
        rec = recommend_top_k(model, ["a0"], 4)
        assert [item.rank for item in rec.items] == list(range(1, len(rec) + 1))
        scores = [item.score for item in rec.items]
        assert scores == sorted(scores, reverse=True)

    def test_count_ties_break_by_element_id(self):
        corpus = [
            make_sequence(["b", "x", "a2", "e"]),
            make_sequence(["b", "x", "a1", "e"], start_ms=10_000),
            make_sequence(["b", "x", "a3", "e"], start_ms=20_000),
        ]
        model = train_markov(corpus, 1)
        rec = recommend_top_k(model, ["x"], 3)
        assert rec.elements() == ["a1", "a2", "a3"]

    def test_empty_history_uses_begin_state(self):
        model = self.deterministic_model()
        rec = recommend_top_k(model, [], 1)
        assert rec.elements() == ["x"]

    def test_k_below_one_rejected(self):
        with pytest.raises(ValueError, match="k"):
            recommend_top_k(self.deterministic_model(), ["x"], 0)

    def test_unknown_history_element_rejected(self):
        with pytest.raises(ValueError, match="vocabulary"):
            recommend_top_k(self.deterministic_model(), ["mystery"], 1)

    def test_backoff_disabled_returns_empty_on_unseen(self):
        v = make_vocabulary(action_count=3)
        model = train_markov([make_sequence(["b", "a0", "a1", "e"])], 2, v)
        rec = recommend_top_k(model, ["a1", "a0"], 3, backoff=False)
        assert len(rec) == 0

    def test_backoff_descends_to_lower_order(self):
        corpus = [
            make_sequence(["b", "a0", "a1", "e"]),
            make_sequence(["b", "a2", "a1", "a0", "e"], start_ms=10_000),
        ]
        v = make_vocabulary(action_count=3)
        model = train_markov(corpus, 2, v)
        # state (a1, a1) unseen at order 2; order-1 state (a1,) has y->e and ->a0
        rec = recommend_top_k(model, ["a1", "a1"], 2)
        assert rec.elements() == ["a0", "e"]

    def test_popularity_fallback_for_unused_element(self):
        v = make_vocabulary(action_count=4)  # a3 never used below
        corpus = [
            make_sequence(["b", "a0", "a1", "e"]),
            make_sequence(["b", "a0", "a2", "e"], start_ms=10_000),
        ]
        model = train_markov(corpus, 1, v)
        rec = recommend_top_k(model, ["a3"], 2)
        # popularity: a0 twice, e twice, a1 once, a2 once -> a0 then e
        assert [(i.element, i.rank) for i in rec.items] == [("a0", 1), ("e", 2)]
        assert rec.items[0].score == pytest.approx(2 / 6)

    def test_matches_oracle_on_random_probes(self):
        rng = random.Random(17)
        v = make_vocabulary(action_count=5)
        corpus = random_corpus(rng, v, 50)
        raw = [list(seq.events) for seq in corpus]
        model = train_markov(corpus, 2, v)
        actions = sorted(v.action_elements)
        for _ in range(100):
            history = [rng.choice(actions) for _ in range(rng.randrange(0, 4))]
            k = rng.randint(1, 5)
            backoff = rng.random() < 0.5
            got = recommend_top_k(model, history, k, backoff=backoff)
            expected = oracle_top_k(raw, 2, v.begin_marker, history, k, backoff=backoff)
            assert [(i.element, i.score, i.rank) for i in got.items] == expected


@st.composite
def corpus_strategy(draw):
    v = make_vocabulary(action_count=draw(st.integers(min_value=2, max_value=6)))
    actions = sorted(v.action_elements)
    n = draw(st.integers(min_value=1, max_value=25))
    corpus = []
    for i in range(n):
        inner = draw(
            st.lists(st.sampled_from(actions), min_size=2, max_size=6)
        )
        corpus.append(
            make_sequence(
                [v.begin_marker, *inner, v.end_marker], user_id=f"u{i % 3}", start_ms=i * 10_000
            )
        )
    return v, corpus


class TestRecommendProperties:
    @given(corpus_strategy(), st.integers(min_value=1, max_value=3), st.integers(min_value=1, max_value=5))
    @settings(max_examples=120, deadline=None)
    def test_oracle_equivalence(self, vocab_corpus, order, k):
        v, corpus = vocab_corpus
        raw = [list(seq.events) for seq in corpus]
        model = train_markov(corpus, order, v)
        probes = [list(seq.events[:i]) for seq in corpus[:5] for i in range(1, len(seq.events))]
        probes.append([])
        for history in probes:
            got = recommend_top_k(model, history, k)
            expected = oracle_top_k(raw, order, v.begin_marker, history, k)
            assert [(i.element, i.score, i.rank) for i in got.items] == expected


class TestContextStore:
    def build_corpus(self):
        corpus = []
        # operator/morning: a0 -> a1; operator/evening: a0 -> a2; supervisor: a0 -> a3
        for i in range(4):
            corpus.append(
                make_sequence(
                    ["b", "a0", "a1", "e"], user_id="u1", context=OP_MORNING, start_ms=i * 10_000
                )
            )
            corpus.append(
                make_sequence(
                    ["b", "a0", "a2", "e"], user_id="u2", context=OP_EVENING, start_ms=i * 10_000
                )
            )
        corpus.append(
            make_sequence(["b", "a0", "a3", "e"], user_id="u3", context=SUP_MORNING)
        )
        return corpus

    def test_tier_selection(self):
        v = make_vocabulary(action_count=4)
        store = build_context_store(self.build_corpus(), 1, min_support=4, vocabulary=v)
        assert set(store.per_context) == {("operator", "morning"), ("operator", "evening")}
        assert set(store.per_role) == {"operator"}

        exact = select_model(store, OP_MORNING)
        assert exact.tier == "context"
        assert recommend_top_k(exact.model, ["a0"], 1).elements() == ["a1"]

        role_fallback = select_model(store, ContextAttributes("operator", "night"))
        assert role_fallback.tier == "role"

        global_fallback = select_model(store, ContextAttributes("supervisor", "morning"))
        assert global_fallback.tier == "global"
        assert global_fallback.model is store.global_model

    def test_partition_counts_reported_even_without_models(self):
        store = build_context_store(self.build_corpus(), 1, min_support=100)
        assert store.per_context == {}
        assert store.per_role == {}
        assert store.context_counts[("supervisor", "morning")] == 1
        assert store.role_counts == {"operator": 8, "supervisor": 1}
        assert store.sequence_count == 9

    def test_context_mode_off_trains_only_global(self):
        store = build_context_store(self.build_corpus(), 1, min_support=1, context_mode=False)
        assert store.per_context == {}
        assert store.per_role == {}
        assert store.global_model.total_transitions > 0

    def test_global_model_sees_every_sequence(self):
        corpus = self.build_corpus()
        store = build_context_store(corpus, 1, min_support=4)
        direct = train_markov(corpus, 1)
        assert store.global_model.counts == direct.counts


class TestSnapshots:
    def test_model_roundtrip(self, tmp_path):
        rng = random.Random(23)
        v = make_vocabulary(action_count=5)
        corpus = random_corpus(rng, v, 40)
        model = train_markov(corpus, 2, v)
        path = tmp_path / "model.json"
        save_snapshot(model_to_doc(model), str(path))
        restored = model_from_doc(load_snapshot(str(path)))
        assert restored.order == model.order
        assert restored.counts == model.counts
        assert restored.popularity == model.popularity
        assert restored.vocabulary == model.vocabulary
        for history in ([], ["a0"], ["a1", "a2"], ["a4", "a4", "a4"]):
            before = recommend_top_k(model, history, 3)
            after = recommend_top_k(restored, history, 3)
            assert before == after

    def test_store_roundtrip(self, tmp_path):
        rng = random.Random(29)
        v = make_vocabulary(action_count=5)
        corpus = random_corpus(rng, v, 120)
        store = build_context_store(corpus, 2, min_support=10, vocabulary=v)
        path = tmp_path / "store.json"
        save_snapshot(store_to_doc(store), str(path))
        restored = store_from_doc(load_snapshot(str(path)))
        assert isinstance(restored, ContextModelStore)
        assert restored.order == store.order
        assert restored.min_support == store.min_support
        assert set(restored.per_context) == set(store.per_context)
        assert set(restored.per_role) == set(store.per_role)
        assert restored.context_counts == store.context_counts
        assert restored.role_counts == store.role_counts
        for context in (OP_MORNING, OP_EVENING, SUP_MORNING, ContextAttributes("x", "y")):
            a = select_model(store, context)
            b = select_model(restored, context)
            assert a.tier == b.tier
            assert recommend_top_k(a.model, ["a0"], 3) == recommend_top_k(b.model, ["a0"], 3)

    def test_snapshot_bytes_are_stable(self, tmp_path):
        rng = random.Random(31)
        v = make_vocabulary(action_count=4)
        corpus = random_corpus(rng, v, 30)
        model = train_markov(corpus, 2, v)
        p1, p2 = tmp_path / "one.json", tmp_path / "two.json"
        save_snapshot(model_to_doc(model), str(p1))
        save_snapshot(model_to_doc(model_from_doc(load_snapshot(str(p1)))), str(p2))
        assert p1.read_bytes() == p2.read_bytes()

    def test_wrong_format_rejected(self):
        with pytest.raises(ValueError, match="snapshot"):
            model_from_doc({"format": "something-else"})
        with pytest.raises(ValueError, match="store"):
            store_from_doc({"format": "something-else"})
