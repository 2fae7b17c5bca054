"""Extraction of valid interaction sequences from per-user event streams.

A valid sequence is a begin-marker .. end-marker bracket with at least two
inner events. The scan is left-to-right and never assigns an event to two
sequences: a begin marker seen while a bracket is open discards the open
bracket and starts a new one, an end marker with no open bracket is
discarded, and a bracket whose context changes mid-run is discarded whole.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .events import ContextAttributes, ElementId, ElementVocabulary, InteractionEvent

MIN_INNER_LENGTH = 2


@dataclass(frozen=True)
class InteractionSequence:
    """A validated run of element ids from the begin marker to the end marker."""

    user_id: str
    context: ContextAttributes
    events: tuple[ElementId, ...]
    start_ms: int
    end_ms: int

    def __post_init__(self) -> None:
        if len(self.events) < MIN_INNER_LENGTH + 2:
            raise ValueError("sequence needs the two markers plus at least two inner events")
        if self.start_ms > self.end_ms:
            raise ValueError("sequence start time is after its end time")

    @property
    def inner_length(self) -> int:
        return len(self.events) - 2

    def validate_markers(self, vocabulary: ElementVocabulary) -> None:
        """Check the marker bracketing invariants against a vocabulary."""
        if self.events[0] != vocabulary.begin_marker:
            raise ValueError("sequence does not start with the begin marker")
        if self.events[-1] != vocabulary.end_marker:
            raise ValueError("sequence does not end with the end marker")
        for element in self.events[1:-1]:
            if element in (vocabulary.begin_marker, vocabulary.end_marker):
                raise ValueError("marker appears inside the sequence body")


@dataclass
class ExtractionStats:
    """Counters for everything the scan dropped."""

    emitted_sequences: int = 0
    discarded_events: int = 0
    too_short_sequences: int = 0
    context_change_sequences: int = 0

    def merge(self, other: "ExtractionStats") -> None:
        self.emitted_sequences += other.emitted_sequences
        self.discarded_events += other.discarded_events
        self.too_short_sequences += other.too_short_sequences
        self.context_change_sequences += other.context_change_sequences


def extract_valid_sequences(
    events: Sequence[InteractionEvent],
    vocabulary: ElementVocabulary,
) -> tuple[list[InteractionSequence], ExtractionStats]:
    """Scan one user's time-ordered stream into valid sequences.

    Every input event ends up either inside exactly one emitted sequence or
    in ``stats.discarded_events``, so event counts are conserved.
    """
    begin = vocabulary.begin_marker
    end = vocabulary.end_marker
    sequences: list[InteractionSequence] = []
    stats = ExtractionStats()
    open_bracket: list[InteractionEvent] | None = None

    def discard_bracket(bracket: list[InteractionEvent]) -> None:
        stats.discarded_events += len(bracket)

    for event in events:
        if event.element == begin:
            if open_bracket is not None:
                discard_bracket(open_bracket)
            open_bracket = [event]
        elif event.element == end:
            if open_bracket is None:
                stats.discarded_events += 1
                continue
            open_bracket.append(event)
            inner = len(open_bracket) - 2
            context = open_bracket[0].context
            if inner < MIN_INNER_LENGTH:
                stats.too_short_sequences += 1
                discard_bracket(open_bracket)
            elif any(ev.context != context for ev in open_bracket):
                stats.context_change_sequences += 1
                discard_bracket(open_bracket)
            else:
                sequences.append(
                    InteractionSequence(
                        user_id=open_bracket[0].user_id,
                        context=context,
                        events=tuple(ev.element for ev in open_bracket),
                        start_ms=open_bracket[0].timestamp_ms,
                        end_ms=open_bracket[-1].timestamp_ms,
                    )
                )
                stats.emitted_sequences += 1
            open_bracket = None
        else:
            if open_bracket is None:
                stats.discarded_events += 1
            else:
                open_bracket.append(event)

    if open_bracket is not None:
        discard_bracket(open_bracket)

    return sequences, stats


def extract_corpus(
    events_by_user: Mapping[str, Sequence[InteractionEvent]],
    vocabulary: ElementVocabulary,
) -> tuple[list[InteractionSequence], ExtractionStats]:
    """Run the extractor over every user stream and pool the results."""
    corpus: list[InteractionSequence] = []
    stats = ExtractionStats()
    for stream in events_by_user.values():
        sequences, user_stats = extract_valid_sequences(stream, vocabulary)
        corpus.extend(sequences)
        stats.merge(user_stats)
    return corpus, stats


@dataclass(frozen=True)
class CorpusStats:
    total_sequences: int
    sequences_per_user_mean: float
    inner_length_median: int
    event_count: int


def corpus_stats(sequences: Sequence[InteractionSequence]) -> CorpusStats:
    """Aggregate corpus shape statistics.

    The median uses the lower-middle element for even counts; an empty corpus
    yields all zeros.
    """
    if not sequences:
        return CorpusStats(0, 0.0, 0, 0)
    per_user: dict[str, int] = {}
    for seq in sequences:
        per_user[seq.user_id] = per_user.get(seq.user_id, 0) + 1
    lengths = sorted(seq.inner_length for seq in sequences)
    return CorpusStats(
        total_sequences=len(sequences),
        sequences_per_user_mean=len(sequences) / len(per_user),
        inner_length_median=lengths[(len(lengths) - 1) // 2],
        event_count=sum(len(seq.events) for seq in sequences),
    )


def sequence_to_record(sequence: InteractionSequence) -> dict:
    return {
        "user_id": sequence.user_id,
        "role": sequence.context.role,
        "shift": sequence.context.shift,
        "events": list(sequence.events),
        "start_ms": sequence.start_ms,
        "end_ms": sequence.end_ms,
    }


def sequence_from_record(record: Mapping) -> InteractionSequence:
    return InteractionSequence(
        user_id=record["user_id"],
        context=ContextAttributes(role=record["role"], shift=record["shift"]),
        events=tuple(record["events"]),
        start_ms=record["start_ms"],
        end_ms=record["end_ms"],
    )


def write_corpus(sequences: Iterable[InteractionSequence], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fp:
        for seq in sequences:
            fp.write(json.dumps(sequence_to_record(seq), sort_keys=True))
            fp.write("\n")


def read_corpus(path: str) -> list[InteractionSequence]:
    corpus: list[InteractionSequence] = []
    with open(path, encoding="utf-8") as fp:
        for line in fp:
            if line.strip():
                corpus.append(sequence_from_record(json.loads(line)))
    return corpus
