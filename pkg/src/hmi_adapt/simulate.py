"""Synthetic operator behaviour for exercising the full pipeline.

Each simulated population mixes a handful of behaviour profiles. A profile
owns a ground-truth transition table over bounded histories, so the ideal
next action depends on the last ``memory_order`` true actions. Generated
logs are reproducible from the seed alone; every user draws from an
independent generator keyed by the seed and the user index, so adding users
never disturbs the sequences of existing ones.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .events import ContextAttributes, ElementVocabulary, ElementId, InteractionEvent
from .markov import State, pad_history

# Probability assigned to each successor by position when a state branches
# b ways. Front-loaded so one action dominates without being certain.
BRANCH_WEIGHTS: Mapping[int, tuple[float, ...]] = {
    1: (1.0,),
    2: (0.7, 0.3),
    3: (0.55, 0.30, 0.15),
    4: (0.45, 0.28, 0.17, 0.10),
}

# Inner lengths (markers excluded) and their draw weights. Mean 6.82,
# median 8 under repeated draws.
DEFAULT_LENGTH_PMF: Mapping[int, float] = {
    2: 0.14,
    3: 0.14,
    7: 0.18,
    8: 0.18,
    9: 0.18,
    10: 0.18,
}

DEFAULT_NOISE_RATE = 0.1


def default_vocabulary() -> ElementVocabulary:
    """Control panel of an industrial batch mixing machine."""
    return ElementVocabulary(
        elements=(
            "btn_new_batch",
            "recipe_select_dough",
            "recipe_select_sauce",
            "recipe_select_icing",
            "btn_dose_flour",
            "btn_dose_water",
            "btn_dose_sugar",
            "btn_dose_oil",
            "input_mixer_speed",
            "input_mixer_time",
            "btn_start_mixer",
            "btn_stop_mixer",
            "btn_discharge_bowl",
            "btn_alarm_ack",
            "btn_tare_scale",
            "btn_confirm_batch",
        ),
        begin_marker="btn_new_batch",
        end_marker="btn_confirm_batch",
        roles=frozenset({"operator", "supervisor"}),
        shifts=frozenset({"morning", "evening", "night"}),
    )


@dataclass(frozen=True)
class BehaviorProfile:
    """Ground truth for one operator population.

    ``ground_truth`` maps each reachable padded history to its successor
    distribution over action elements; the end of a sequence is driven by a
    length draw, not by the table.
    """

    name: str
    context: ContextAttributes
    memory_order: int
    begin_marker: ElementId
    ground_truth: Mapping[State, tuple[tuple[ElementId, float], ...]]
    noise_rate: float = DEFAULT_NOISE_RATE
    length_pmf: Mapping[int, float] = field(default_factory=lambda: dict(DEFAULT_LENGTH_PMF))

    def __post_init__(self) -> None:
        if self.memory_order < 1:
            raise ValueError("memory_order must be >= 1")
        if not 0.0 <= self.noise_rate < 1.0:
            raise ValueError("noise_rate must lie in [0, 1)")
        if not self.ground_truth:
            raise ValueError("empty ground truth table")
        for successors in self.ground_truth.values():
            total = sum(weight for _, weight in successors)
            if abs(total - 1.0) > 1e-9:
                raise ValueError("successor weights must sum to 1")

    def successor_distribution(self, history: Sequence[ElementId]) -> dict[ElementId, float]:
        state = pad_history(history, self.memory_order, self.begin_marker)
        successors = self.ground_truth.get(state)
        if successors is None:
            raise KeyError(f"history state {state!r} is not reachable for profile {self.name!r}")
        return dict(successors)


def build_profile(
    name: str,
    context: ContextAttributes,
    vocabulary: ElementVocabulary,
    memory_order: int,
    rng: random.Random,
    branching: tuple[int, int] = (2, 4),
    noise_rate: float = DEFAULT_NOISE_RATE,
    length_pmf: Optional[Mapping[int, float]] = None,
) -> BehaviorProfile:
    """Grow a closed ground-truth table by walking reachable states.

    Starting from the all-begin state, each newly reached state draws a
    branch count in ``branching`` and samples that many distinct successors
    from the action elements. The walk closes the table, so generation can
    never step off it.
    """
    lo, hi = branching
    actions = sorted(vocabulary.action_elements)
    if not 1 <= lo <= hi <= len(actions):
        raise ValueError("branching range must fit inside the action element count")
    if hi > max(BRANCH_WEIGHTS):
        raise ValueError(f"branching wider than {max(BRANCH_WEIGHTS)} is not supported")

    table: dict[State, tuple[tuple[ElementId, float], ...]] = {}
    initial: State = (vocabulary.begin_marker,) * memory_order
    frontier: list[State] = [initial]
    while frontier:
        state = frontier.pop(0)
        if state in table:
            continue
        count = rng.randint(lo, hi)
        successors = rng.sample(actions, count)
        table[state] = tuple(zip(successors, BRANCH_WEIGHTS[count]))
        for successor in successors:
            frontier.append((state + (successor,))[-memory_order:])

    return BehaviorProfile(
        name=name,
        context=context,
        memory_order=memory_order,
        begin_marker=vocabulary.begin_marker,
        ground_truth=table,
        noise_rate=noise_rate,
        length_pmf=dict(length_pmf) if length_pmf is not None else dict(DEFAULT_LENGTH_PMF),
    )


@dataclass(frozen=True)
class SimulationConfig:
    user_count: int
    sequences_per_user: int
    profiles: tuple[BehaviorProfile, ...]
    weights: tuple[float, ...]
    vocabulary: ElementVocabulary
    seed: int
    base_ms: int = 1_700_000_000_000

    def __post_init__(self) -> None:
        if self.user_count < 1 or self.sequences_per_user < 1:
            raise ValueError("user_count and sequences_per_user must be >= 1")
        if not self.profiles:
            raise ValueError("no behaviour profiles")
        if len(self.weights) != len(self.profiles):
            raise ValueError("one weight per profile is required")


def default_simulation_config(
    seed: int = 7,
    user_count: int = 24,
    sequences_per_user: int = 50,
    memory_order: int = 2,
    noise_rate: float = DEFAULT_NOISE_RATE,
) -> SimulationConfig:
    """Four populations over the default panel, 24 users by 50 runs by default."""
    vocabulary = default_vocabulary()
    rng = random.Random(f"{seed}/profiles")
    contexts = [
        ContextAttributes("operator", "morning"),
        ContextAttributes("operator", "evening"),
        ContextAttributes("operator", "night"),
        ContextAttributes("supervisor", "morning"),
    ]
    profiles = tuple(
        build_profile(
            name=f"{ctx.role}_{ctx.shift}",
            context=ctx,
            vocabulary=vocabulary,
            memory_order=memory_order,
            rng=rng,
            noise_rate=noise_rate,
        )
        for ctx in contexts
    )
    return SimulationConfig(
        user_count=user_count,
        sequences_per_user=sequences_per_user,
        profiles=profiles,
        weights=(1.0,) * len(profiles),
        vocabulary=vocabulary,
        seed=seed,
    )


def _user_rng(seed: int, index: int) -> random.Random:
    return random.Random(f"{seed}/user/{index}")


def profile_assignments(config: SimulationConfig) -> list[BehaviorProfile]:
    """Replay the per-user profile draw without generating any events."""
    assignments = []
    for index in range(config.user_count):
        rng = _user_rng(config.seed, index)
        assignments.append(rng.choices(config.profiles, weights=config.weights)[0])
    return assignments


def _draw_length(rng: random.Random, pmf: Mapping[int, float]) -> int:
    lengths = sorted(pmf)
    return rng.choices(lengths, weights=[pmf[length] for length in lengths])[0]


def generate_interaction_log(config: SimulationConfig) -> dict[str, list[InteractionEvent]]:
    """Produce a complete event log keyed by user id.

    Every sequence opens with the begin marker and closes with the end
    marker. Noise replaces the emitted element with a uniform action draw
    while the underlying chain still advances on the intended element, which
    mirrors an operator mis-tapping without abandoning the procedure.
    """
    vocabulary = config.vocabulary
    actions = sorted(vocabulary.action_elements)
    log: dict[str, list[InteractionEvent]] = {}
    for index in range(config.user_count):
        rng = _user_rng(config.seed, index)
        profile = rng.choices(config.profiles, weights=config.weights)[0]
        user_id = f"user_{index:03d}"
        events: list[InteractionEvent] = []
        now = config.base_ms + index * 3_600_000

        def emit(element: ElementId) -> None:
            nonlocal now
            events.append(
                InteractionEvent(
                    user_id=user_id,
                    element=element,
                    timestamp_ms=now,
                    context=profile.context,
                )
            )
            now += rng.randint(800, 5_000)

        for _ in range(config.sequences_per_user):
            inner_length = _draw_length(rng, profile.length_pmf)
            emit(vocabulary.begin_marker)
            state: State = (vocabulary.begin_marker,) * profile.memory_order
            for _ in range(inner_length):
                successors = profile.ground_truth[state]
                true_element = rng.choices(
                    [element for element, _ in successors],
                    weights=[weight for _, weight in successors],
                )[0]
                emitted = true_element
                if profile.noise_rate > 0 and rng.random() < profile.noise_rate:
                    emitted = rng.choice(actions)
                emit(emitted)
                state = (state + (true_element,))[-profile.memory_order:]
            emit(vocabulary.end_marker)
            now += rng.randint(30_000, 300_000)
        log[user_id] = events
    return log


def profile_to_doc(profile: BehaviorProfile) -> dict:
    return {
        "name": profile.name,
        "role": profile.context.role,
        "shift": profile.context.shift,
        "memory_order": profile.memory_order,
        "noise_rate": profile.noise_rate,
        "length_pmf": {str(length): weight for length, weight in sorted(profile.length_pmf.items())},
        "states": [
            {
                "state": list(state),
                "successors": [[element, weight] for element, weight in successors],
            }
            for state, successors in sorted(profile.ground_truth.items())
        ],
    }


def simulation_sidecar(config: SimulationConfig) -> dict:
    """Ground-truth document written next to a simulated log."""
    assignments = profile_assignments(config)
    return {
        "seed": config.seed,
        "user_count": config.user_count,
        "sequences_per_user": config.sequences_per_user,
        "assignments": {
            f"user_{index:03d}": profile.name for index, profile in enumerate(assignments)
        },
        "profiles": [profile_to_doc(profile) for profile in config.profiles],
    }
