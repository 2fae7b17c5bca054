import json
import random

import pytest

from hmi_adapt.events import ContextAttributes
from hmi_adapt.sequences import corpus_stats, extract_corpus
from hmi_adapt.simulate import (
    BRANCH_WEIGHTS,
    DEFAULT_LENGTH_PMF,
    BehaviorProfile,
    SimulationConfig,
    build_profile,
    default_simulation_config,
    default_vocabulary,
    generate_interaction_log,
    profile_assignments,
    simulation_sidecar,
)

CTX = ContextAttributes("operator", "morning")


def small_profile(seed=1, memory_order=2, noise_rate=0.0, branching=(2, 3)):
    return build_profile(
        name="p",
        context=CTX,
        vocabulary=default_vocabulary(),
        memory_order=memory_order,
        rng=random.Random(seed),
        branching=branching,
        noise_rate=noise_rate,
    )


class TestTables:
    def test_branch_weight_rows_sum_to_one(self):
        for weights in BRANCH_WEIGHTS.values():
            assert sum(weights) == pytest.approx(1.0)

    def test_length_pmf_sums_to_one(self):
        assert sum(DEFAULT_LENGTH_PMF.values()) == pytest.approx(1.0)

    def test_default_vocabulary_shape(self):
        v = default_vocabulary()
        assert len(v.elements) == 16
        assert v.begin_marker in v.elements
        assert v.end_marker in v.elements
        assert v.roles == frozenset({"operator", "supervisor"})
        assert v.shifts == frozenset({"morning", "evening", "night"})


class TestBuildProfile:
    def test_table_is_closed_under_transitions(self):
        profile = small_profile()
        for state, successors in profile.ground_truth.items():
            for element, _ in successors:
                follow = (state + (element,))[-profile.memory_order:]
                assert follow in profile.ground_truth

    def test_branching_and_weights(self):
        profile = small_profile(branching=(2, 3))
        for successors in profile.ground_truth.values():
            count = len(successors)
            assert 2 <= count <= 3
            assert tuple(weight for _, weight in successors) == BRANCH_WEIGHTS[count]

    def test_deterministic_for_a_seed(self):
        assert small_profile(seed=5).ground_truth == small_profile(seed=5).ground_truth
        assert small_profile(seed=5).ground_truth != small_profile(seed=6).ground_truth

    def test_successors_are_action_elements_only(self):
        v = default_vocabulary()
        profile = small_profile()
        for successors in profile.ground_truth.values():
            for element, _ in successors:
                assert element in v.action_elements

    def test_branching_range_validated(self):
        with pytest.raises(ValueError):
            small_profile(branching=(0, 2))
        with pytest.raises(ValueError):
            small_profile(branching=(2, 99))

    def test_successor_distribution_pads_short_histories(self):
        profile = small_profile(memory_order=2)
        initial = profile.successor_distribution([])
        assert initial == dict(profile.ground_truth[("btn_new_batch", "btn_new_batch")])
        # the end marker is never part of a reachable state
        with pytest.raises(KeyError):
            profile.successor_distribution(["btn_confirm_batch", "btn_confirm_batch"])


class TestProfileValidation:
    def test_bad_memory_order(self):
        with pytest.raises(ValueError):
            BehaviorProfile(
                name="p",
                context=CTX,
                memory_order=0,
                begin_marker="b",
                ground_truth={("b",): (("x", 1.0),)},
            )

    def test_bad_noise_rate(self):
        with pytest.raises(ValueError):
            BehaviorProfile(
                name="p",
                context=CTX,
                memory_order=1,
                begin_marker="b",
                ground_truth={("b",): (("x", 1.0),)},
                noise_rate=1.0,
            )

    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError):
            BehaviorProfile(
                name="p",
                context=CTX,
                memory_order=1,
                begin_marker="b",
                ground_truth={("b",): (("x", 0.5),)},
            )

    def test_empty_table_rejected(self):
        with pytest.raises(ValueError):
            BehaviorProfile(
                name="p", context=CTX, memory_order=1, begin_marker="b", ground_truth={}
            )


class TestGeneration:
    def config(self, **overrides):
        values = dict(seed=13, user_count=4, sequences_per_user=6)
        values.update(overrides)
        return default_simulation_config(**values)

    def test_deterministic(self):
        first = generate_interaction_log(self.config())
        second = generate_interaction_log(self.config())
        assert first == second

    def test_users_are_independent_streams(self):
        small = generate_interaction_log(self.config(user_count=3))
        large = generate_interaction_log(self.config(user_count=5))
        for user in small:
            assert small[user] == large[user]

    def test_stream_shape(self):
        config = self.config()
        log = generate_interaction_log(config)
        assert set(log) == {f"user_{i:03d}" for i in range(4)}
        v = config.vocabulary
        for events in log.values():
            times = [e.timestamp_ms for e in events]
            assert times == sorted(times)
            assert len(set(times)) == len(times)
            assert len({e.context for e in events}) == 1
            begins = sum(1 for e in events if e.element == v.begin_marker)
            ends = sum(1 for e in events if e.element == v.end_marker)
            assert begins == ends == config.sequences_per_user

    def test_every_sequence_extracts_cleanly(self):
        config = self.config()
        log = generate_interaction_log(config)
        corpus, stats = extract_corpus(log, config.vocabulary)
        assert stats.discarded_events == 0
        assert len(corpus) == 4 * 6
        for seq in corpus:
            assert seq.inner_length in DEFAULT_LENGTH_PMF

    def test_noise_free_runs_follow_the_ground_truth(self):
        config = self.config(noise_rate=0.0)
        log = generate_interaction_log(config)
        assignments = profile_assignments(config)
        corpus, _ = extract_corpus(log, config.vocabulary)
        by_user = {f"user_{i:03d}": profile for i, profile in enumerate(assignments)}
        for seq in corpus:
            profile = by_user[seq.user_id]
            state = (config.vocabulary.begin_marker,) * profile.memory_order
            for element in seq.events[1:-1]:
                allowed = dict(profile.ground_truth[state])
                assert element in allowed
                state = (state + (element,))[-profile.memory_order:]

    def test_assignment_replay_matches_generated_contexts(self):
        config = self.config()
        log = generate_interaction_log(config)
        assignments = profile_assignments(config)
        for index, profile in enumerate(assignments):
            events = log[f"user_{index:03d}"]
            assert all(e.context == profile.context for e in events)

    def test_default_scale_hits_the_target_volume(self):
        config = default_simulation_config(seed=7)
        log = generate_interaction_log(config)
        corpus, _ = extract_corpus(log, config.vocabulary)
        stats = corpus_stats(corpus)
        assert stats.total_sequences == 24 * 50
        assert stats.inner_length_median == 8
        assert 10_608 * 0.9 <= stats.event_count <= 10_608 * 1.1

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SimulationConfig(
                user_count=0,
                sequences_per_user=1,
                profiles=(small_profile(),),
                weights=(1.0,),
                vocabulary=default_vocabulary(),
                seed=1,
            )
        with pytest.raises(ValueError):
            SimulationConfig(
                user_count=1,
                sequences_per_user=1,
                profiles=(small_profile(),),
                weights=(1.0, 2.0),
                vocabulary=default_vocabulary(),
                seed=1,
            )


class TestSidecar:
    def test_sidecar_covers_assignments_and_profiles(self):
        config = default_simulation_config(seed=3, user_count=5, sequences_per_user=2)
        doc = simulation_sidecar(config)
        assert len(doc["assignments"]) == 5
        names = {profile["name"] for profile in doc["profiles"]}
        assert set(doc["assignments"].values()) <= names
        encoded = json.dumps(doc, sort_keys=True)
        assert json.dumps(simulation_sidecar(config), sort_keys=True) == encoded

    def test_profile_doc_lists_states_with_weights(self):
        config = default_simulation_config(seed=3, user_count=2, sequences_per_user=2)
        doc = simulation_sidecar(config)
        profile_doc = doc["profiles"][0]
        assert profile_doc["memory_order"] == 2
        for entry in profile_doc["states"]:
            assert len(entry["state"]) == 2
            total = sum(weight for _, weight in entry["successors"])
            assert total == pytest.approx(1.0)
