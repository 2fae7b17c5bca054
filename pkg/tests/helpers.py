"""Shared fixture builders for the test suite."""

from __future__ import annotations

import random

from hmi_adapt.events import ContextAttributes, ElementVocabulary, InteractionEvent
from hmi_adapt.sequences import InteractionSequence

OP_MORNING = ContextAttributes("operator", "morning")
OP_EVENING = ContextAttributes("operator", "evening")
SUP_MORNING = ContextAttributes("supervisor", "morning")


def make_vocabulary(action_count: int = 4, begin: str = "b", end: str = "e") -> ElementVocabulary:
    actions = tuple(f"a{i}" for i in range(action_count))
    return ElementVocabulary(
        elements=frozenset(actions) | {begin, end},
        begin_marker=begin,
        end_marker=end,
    )


def make_sequence(
    events,
    user_id: str = "u1",
    context: ContextAttributes = OP_MORNING,
    start_ms: int = 0,
    step_ms: int = 1000,
) -> InteractionSequence:
    events = tuple(events)
    return InteractionSequence(
        user_id=user_id,
        context=context,
        events=events,
        start_ms=start_ms,
        end_ms=start_ms + step_ms * (len(events) - 1),
    )


def make_events(
    elements,
    user_id: str = "u1",
    context: ContextAttributes = OP_MORNING,
    start_ms: int = 0,
    step_ms: int = 1000,
) -> list[InteractionEvent]:
    return [
        InteractionEvent(
            user_id=user_id, element=element, timestamp_ms=start_ms + i * step_ms, context=context
        )
        for i, element in enumerate(elements)
    ]


def random_corpus(
    rng: random.Random,
    vocabulary: ElementVocabulary,
    n_sequences: int,
    users: int = 4,
    min_inner: int = 2,
    max_inner: int = 6,
) -> list[InteractionSequence]:
    """Uniform random sequences with strictly increasing per-user start times."""
    actions = sorted(vocabulary.action_elements)
    contexts = [
        ContextAttributes(role, shift)
        for role in ("operator", "supervisor")
        for shift in ("morning", "evening")
    ]
    corpus = []
    for index in range(n_sequences):
        inner = [rng.choice(actions) for _ in range(rng.randint(min_inner, max_inner))]
        corpus.append(
            make_sequence(
                [vocabulary.begin_marker, *inner, vocabulary.end_marker],
                user_id=f"u{rng.randrange(users)}",
                context=rng.choice(contexts),
                start_ms=index * 100_000,
            )
        )
    return corpus
