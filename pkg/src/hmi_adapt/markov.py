"""Order-n Markov chain training and top-k next-element recommendation.

States are n-tuples of element ids. Histories shorter than the order are
left-padded with the begin marker, both at training and at inference time, so
the chain can predict from the very first interaction. Transition
probabilities are plain count ratios; no smoothing is applied. When a state
was never observed, an optional backoff walks down an internally maintained
chain of lower-order models and finally falls back to the global
next-element popularity distribution.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence

from .events import ContextAttributes, ElementId, ElementVocabulary
from .sequences import InteractionSequence

State = tuple[ElementId, ...]

MODEL_FORMAT = "hmi-adapt-model"
STORE_FORMAT = "hmi-adapt-store"
FORMAT_VERSION = 1

DEFAULT_MIN_SUPPORT = 30


def pad_history(history: Sequence[ElementId], order: int, begin_marker: ElementId) -> State:
    """Map an arbitrary history onto an order-n state.

    Short histories are left-padded with the begin marker; long ones keep
    only their last ``order`` elements.
    """
    if len(history) >= order:
        return tuple(history[len(history) - order:])
    return (begin_marker,) * (order - len(history)) + tuple(history)


@dataclass(frozen=True)
class RecommendationItem:
    element: ElementId
    score: float
    rank: int


@dataclass(frozen=True)
class RankedRecommendation:
    """Ranked next-element candidates, highest probability first."""

    items: tuple[RecommendationItem, ...] = ()

    def elements(self) -> list[ElementId]:
        return [item.element for item in self.items]

    def rank_of(self, element: ElementId) -> Optional[int]:
        for item in self.items:
            if item.element == element:
                return item.rank
        return None

    def __len__(self) -> int:
        return len(self.items)


@dataclass(frozen=True)
class MarkovModel:
    """Transition counts for one chain order, plus its backoff chain.

    ``counts`` maps each observed state to its successor counts;
    probabilities are derived as count ratios on demand. ``lower`` holds the
    order-(n-1) model obtained by marginalizing the first element out of
    every state, down to order 1. ``popularity`` is the global distribution
    over transition targets shared by the whole chain.
    """

    order: int
    vocabulary: ElementVocabulary
    counts: Mapping[State, Mapping[ElementId, int]]
    state_totals: Mapping[State, int]
    total_transitions: int
    popularity: Mapping[ElementId, int]
    lower: Optional["MarkovModel"] = None

    def probability(self, state: State, nxt: ElementId) -> float:
        dist = self.counts.get(state)
        if not dist or nxt not in dist:
            return 0.0
        return dist[nxt] / self.state_totals[state]


def _marginalize(counts: Mapping[State, Mapping[ElementId, int]]) -> dict[State, dict[ElementId, int]]:
    out: dict[State, dict[ElementId, int]] = {}
    for state, dist in counts.items():
        bucket = out.setdefault(state[1:], {})
        for nxt, count in dist.items():
            bucket[nxt] = bucket.get(nxt, 0) + count
    return out


def _assemble_chain(
    counts: dict[State, dict[ElementId, int]],
    order: int,
    vocabulary: ElementVocabulary,
    popularity: Mapping[ElementId, int],
) -> MarkovModel:
    lower = None
    if order > 1:
        lower = _assemble_chain(_marginalize(counts), order - 1, vocabulary, popularity)
    return MarkovModel(
        order=order,
        vocabulary=vocabulary,
        counts=counts,
        state_totals={state: sum(dist.values()) for state, dist in counts.items()},
        total_transitions=sum(sum(dist.values()) for dist in counts.values()),
        popularity=popularity,
        lower=lower,
    )


def _infer_vocabulary(sequences: Sequence[InteractionSequence]) -> ElementVocabulary:
    elements = {element for seq in sequences for element in seq.events}
    return ElementVocabulary(
        elements=frozenset(elements),
        begin_marker=sequences[0].events[0],
        end_marker=sequences[0].events[-1],
    )


def train_markov(
    sequences: Iterable[InteractionSequence],
    order: int,
    vocabulary: Optional[ElementVocabulary] = None,
) -> MarkovModel:
    """Count transitions over a corpus and build the model chain.

    For every event after a sequence's first, the transition from the padded
    n-history into that event is counted, transitions into the end marker
    included. Without an explicit vocabulary, one is inferred from the
    corpus.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    corpus = list(sequences)
    if not corpus:
        raise ValueError("empty training corpus")
    if vocabulary is None:
        vocabulary = _infer_vocabulary(corpus)

    begin = vocabulary.begin_marker
    counts: dict[State, dict[ElementId, int]] = {}
    for seq in corpus:
        events = seq.events
        for i in range(1, len(events)):
            state = pad_history(events[:i], order, begin)
            dist = counts.setdefault(state, {})
            dist[events[i]] = dist.get(events[i], 0) + 1

    popularity: dict[ElementId, int] = {}
    for dist in counts.values():
        for nxt, count in dist.items():
            popularity[nxt] = popularity.get(nxt, 0) + count

    return _assemble_chain(counts, order, vocabulary, popularity)


def transition_probability(model: MarkovModel, state: Sequence[ElementId], nxt: ElementId) -> float:
    """Probability of ``nxt`` following ``state``; 0 for unseen pairs."""
    if len(state) != model.order:
        raise ValueError(f"state length {len(state)} does not match model order {model.order}")
    return model.probability(tuple(state), nxt)


def _rank_distribution(dist: Mapping[ElementId, int], total: int, k: int) -> RankedRecommendation:
    ordered = sorted(dist.items(), key=lambda pair: (-pair[1], pair[0]))
    items = tuple(
        RecommendationItem(element=element, score=count / total, rank=rank)
        for rank, (element, count) in enumerate(ordered[:k], start=1)
    )
    return RankedRecommendation(items=items)


def recommend_top_k(
    model: MarkovModel,
    history: Sequence[ElementId],
    k: int,
    backoff: bool = True,
) -> RankedRecommendation:
    """Top-k successors of the history's state, highest probability first.

    Ties are broken by higher raw count, then ascending element id. On an
    unseen state the backoff consults each lower-order model in turn and
    finally the popularity distribution; with backoff disabled the result is
    empty instead.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    for element in history:
        if element not in model.vocabulary.elements:
            raise ValueError(f"history element not in vocabulary: {element!r}")

    begin = model.vocabulary.begin_marker
    current: Optional[MarkovModel] = model
    while current is not None:
        state = pad_history(history, current.order, begin)
        dist = current.counts.get(state)
        if dist is not None:
            return _rank_distribution(dist, current.state_totals[state], k)
        if not backoff:
            return RankedRecommendation()
        current = current.lower

    if not model.popularity:
        return RankedRecommendation()
    return _rank_distribution(model.popularity, model.total_transitions, k)


class ModelSelection(NamedTuple):
    model: MarkovModel
    tier: str


@dataclass(frozen=True)
class ContextModelStore:
    """Context-pre-filtered models with a role and global fallback chain.

    Partitions smaller than ``min_support`` sequences are observed in the
    counts but get no model of their own.
    """

    order: int
    min_support: int
    global_model: MarkovModel
    per_context: Mapping[tuple[str, str], MarkovModel]
    per_role: Mapping[str, MarkovModel]
    sequence_count: int
    context_counts: Mapping[tuple[str, str], int]
    role_counts: Mapping[str, int]


def build_context_store(
    sequences: Iterable[InteractionSequence],
    order: int,
    min_support: int = DEFAULT_MIN_SUPPORT,
    vocabulary: Optional[ElementVocabulary] = None,
    context_mode: bool = True,
) -> ContextModelStore:
    """Train the global model plus per-(role, shift) and per-role models.

    With ``context_mode`` off only the global model is trained; partition
    counts are still reported.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    corpus = list(sequences)
    if not corpus:
        raise ValueError("empty training corpus")
    if vocabulary is None:
        vocabulary = _infer_vocabulary(corpus)

    by_context: dict[tuple[str, str], list[InteractionSequence]] = {}
    by_role: dict[str, list[InteractionSequence]] = {}
    for seq in corpus:
        key = (seq.context.role, seq.context.shift)
        by_context.setdefault(key, []).append(seq)
        by_role.setdefault(seq.context.role, []).append(seq)

    per_context: dict[tuple[str, str], MarkovModel] = {}
    per_role: dict[str, MarkovModel] = {}
    if context_mode:
        for key, part in by_context.items():
            if len(part) >= min_support:
                per_context[key] = train_markov(part, order, vocabulary)
        for role, part in by_role.items():
            if len(part) >= min_support:
                per_role[role] = train_markov(part, order, vocabulary)

    return ContextModelStore(
        order=order,
        min_support=min_support,
        global_model=train_markov(corpus, order, vocabulary),
        per_context=per_context,
        per_role=per_role,
        sequence_count=len(corpus),
        context_counts={key: len(part) for key, part in by_context.items()},
        role_counts={role: len(part) for role, part in by_role.items()},
    )


def select_model(store: ContextModelStore, context: ContextAttributes) -> ModelSelection:
    """Pick the most specific model available for a context."""
    exact = store.per_context.get((context.role, context.shift))
    if exact is not None:
        return ModelSelection(exact, "context")
    by_role = store.per_role.get(context.role)
    if by_role is not None:
        return ModelSelection(by_role, "role")
    return ModelSelection(store.global_model, "global")


def _counts_to_doc(counts: Mapping[State, Mapping[ElementId, int]]) -> list[dict]:
    return [
        {"state": list(state), "next": {nxt: count for nxt, count in sorted(dist.items())}}
        for state, dist in sorted(counts.items())
    ]


def _counts_from_doc(doc: Iterable[Mapping]) -> dict[State, dict[ElementId, int]]:
    return {tuple(entry["state"]): dict(entry["next"]) for entry in doc}


def model_to_doc(model: MarkovModel) -> dict:
    """Snapshot as a versioned JSON document. Exact counts are persisted,
    never derived probabilities, so snapshots are bit-reproducible."""
    return {
        "format": MODEL_FORMAT,
        "format_version": FORMAT_VERSION,
        "order": model.order,
        "vocabulary": model.vocabulary.to_doc(),
        "counts": _counts_to_doc(model.counts),
    }


def model_from_doc(doc: Mapping) -> MarkovModel:
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError("not a model snapshot document")
    vocabulary = ElementVocabulary.from_doc(doc["vocabulary"])
    counts = _counts_from_doc(doc["counts"])
    popularity: dict[ElementId, int] = {}
    for dist in counts.values():
        for nxt, count in dist.items():
            popularity[nxt] = popularity.get(nxt, 0) + count
    return _assemble_chain(counts, doc["order"], vocabulary, popularity)


def store_to_doc(store: ContextModelStore) -> dict:
    return {
        "format": STORE_FORMAT,
        "format_version": FORMAT_VERSION,
        "order": store.order,
        "min_support": store.min_support,
        "sequence_count": store.sequence_count,
        "vocabulary": store.global_model.vocabulary.to_doc(),
        "global": _counts_to_doc(store.global_model.counts),
        "per_context": [
            {"role": role, "shift": shift, "counts": _counts_to_doc(model.counts)}
            for (role, shift), model in sorted(store.per_context.items())
        ],
        "per_role": [
            {"role": role, "counts": _counts_to_doc(model.counts)}
            for role, model in sorted(store.per_role.items())
        ],
        "context_counts": [
            {"role": role, "shift": shift, "sequences": count}
            for (role, shift), count in sorted(store.context_counts.items())
        ],
        "role_counts": {role: count for role, count in sorted(store.role_counts.items())},
    }


def store_from_doc(doc: Mapping) -> ContextModelStore:
    if doc.get("format") != STORE_FORMAT:
        raise ValueError("not a model store document")
    vocabulary = ElementVocabulary.from_doc(doc["vocabulary"])
    order = doc["order"]

    def build(counts_doc: Iterable[Mapping]) -> MarkovModel:
        counts = _counts_from_doc(counts_doc)
        popularity: dict[ElementId, int] = {}
        for dist in counts.values():
            for nxt, count in dist.items():
                popularity[nxt] = popularity.get(nxt, 0) + count
        return _assemble_chain(counts, order, vocabulary, popularity)

    return ContextModelStore(
        order=order,
        min_support=doc["min_support"],
        global_model=build(doc["global"]),
        per_context={
            (entry["role"], entry["shift"]): build(entry["counts"]) for entry in doc["per_context"]
        },
        per_role={entry["role"]: build(entry["counts"]) for entry in doc["per_role"]},
        sequence_count=doc["sequence_count"],
        context_counts={
            (entry["role"], entry["shift"]): entry["sequences"] for entry in doc["context_counts"]
        },
        role_counts=dict(doc["role_counts"]),
    )


def save_snapshot(doc: Mapping, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fp:
        json.dump(doc, fp, indent=2, sort_keys=True)
        fp.write("\n")


def load_snapshot(path: str) -> dict:
    with open(path, encoding="utf-8") as fp:
        return json.load(fp)
