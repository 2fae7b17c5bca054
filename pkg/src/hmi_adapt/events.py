"""Interaction-event data model and JSONL log ingestion."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable

ElementId = str

EVENT_FIELDS = ("user_id", "element_id", "timestamp_ms", "role", "shift")


class RecordError(ValueError):
    """A single log record failed validation; ``reason`` is a stable token."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class LogFormatError(ValueError):
    """Strict-mode ingestion failure, carrying the offending line number."""

    def __init__(self, line_number: int, reason: str):
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number
        self.reason = reason


@dataclass(frozen=True)
class ElementVocabulary:
    """Closed set of interactive-element ids, including the two sequence markers.

    ``roles`` and ``shifts`` are the closed context enumerations from the run
    configuration; an empty set means the attribute is unconstrained.
    """

    elements: frozenset[ElementId]
    begin_marker: ElementId
    end_marker: ElementId
    roles: frozenset[str] = frozenset()
    shifts: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "elements", frozenset(self.elements))
        object.__setattr__(self, "roles", frozenset(self.roles))
        object.__setattr__(self, "shifts", frozenset(self.shifts))
        for element in self.elements:
            if not element or element != element.strip():
                raise ValueError(f"invalid element id: {element!r}")
        if self.begin_marker == self.end_marker:
            raise ValueError("begin and end markers must differ")
        if self.begin_marker not in self.elements:
            raise ValueError("begin marker is not in the element set")
        if self.end_marker not in self.elements:
            raise ValueError("end marker is not in the element set")
        if len(self.elements) < 3:
            raise ValueError("vocabulary needs both markers plus at least one action element")

    @property
    def action_elements(self) -> frozenset[ElementId]:
        """Elements that are neither the begin nor the end marker."""
        return self.elements - {self.begin_marker, self.end_marker}

    def to_doc(self) -> dict:
        return {
            "elements": sorted(self.elements),
            "begin_marker": self.begin_marker,
            "end_marker": self.end_marker,
            "roles": sorted(self.roles),
            "shifts": sorted(self.shifts),
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "ElementVocabulary":
        return cls(
            elements=frozenset(doc["elements"]),
            begin_marker=doc["begin_marker"],
            end_marker=doc["end_marker"],
            roles=frozenset(doc.get("roles", ())),
            shifts=frozenset(doc.get("shifts", ())),
        )


def load_vocabulary(path: str) -> ElementVocabulary:
    with open(path, encoding="utf-8") as fp:
        return ElementVocabulary.from_doc(json.load(fp))


def save_vocabulary(vocabulary: ElementVocabulary, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fp:
        json.dump(vocabulary.to_doc(), fp, indent=2, sort_keys=True)
        fp.write("\n")


@dataclass(frozen=True)
class ContextAttributes:
    """Context of an interaction: operator role and work shift."""

    role: str
    shift: str


@dataclass(frozen=True)
class InteractionEvent:
    """One timestamped action on a uniquely identified HMI element."""

    user_id: str
    element: ElementId
    timestamp_ms: int
    context: ContextAttributes


def parse_event_record(obj: object, vocabulary: ElementVocabulary) -> InteractionEvent:
    """Validate one decoded JSON record against the vocabulary.

    Raises ``RecordError`` with a stable reason token on the first violation.
    """
    if not isinstance(obj, dict):
        raise RecordError("not_an_object")
    for name in EVENT_FIELDS:
        if name not in obj:
            raise RecordError(f"missing_{name}")

    user_id = obj["user_id"]
    if not isinstance(user_id, str) or not user_id:
        raise RecordError("invalid_user_id")

    element = obj["element_id"]
    if not isinstance(element, str) or not element or element != element.strip():
        raise RecordError("invalid_element_id")
    if element not in vocabulary.elements:
        raise RecordError("unknown_element")

    timestamp = obj["timestamp_ms"]
    if isinstance(timestamp, bool) or not isinstance(timestamp, int) or timestamp < 0:
        raise RecordError("invalid_timestamp")

    role = obj["role"]
    if not isinstance(role, str) or not role:
        raise RecordError("invalid_role")
    if vocabulary.roles and role not in vocabulary.roles:
        raise RecordError("unknown_role")

    shift = obj["shift"]
    if not isinstance(shift, str) or not shift:
        raise RecordError("invalid_shift")
    if vocabulary.shifts and shift not in vocabulary.shifts:
        raise RecordError("unknown_shift")

    return InteractionEvent(
        user_id=user_id,
        element=element,
        timestamp_ms=timestamp,
        context=ContextAttributes(role=role, shift=shift),
    )


@dataclass
class IngestResult:
    """Per-user event streams plus counters for records that were dropped."""

    events_by_user: dict[str, list[InteractionEvent]]
    skipped: int = 0
    errors: list[tuple[int, str]] = field(default_factory=list)

    @property
    def event_count(self) -> int:
        return sum(len(stream) for stream in self.events_by_user.values())

    def all_events(self) -> list[InteractionEvent]:
        out: list[InteractionEvent] = []
        for stream in self.events_by_user.values():
            out.extend(stream)
        return out


def ingest_event_log(
    source: Iterable[str] | IO[str],
    vocabulary: ElementVocabulary,
    strict: bool = True,
) -> IngestResult:
    """Read a JSONL event log into validated, per-user, time-ordered streams.

    Each line is one JSON object with the fields in ``EVENT_FIELDS``; unknown
    extra fields are ignored and blank lines are skipped. In strict mode the
    first bad record aborts with its line number; in lenient mode bad records
    are skipped and counted. Within a user, events are sorted by timestamp
    with ingestion order breaking ties.
    """
    events_by_user: dict[str, list[InteractionEvent]] = {}
    skipped = 0
    errors: list[tuple[int, str]] = []

    for line_number, line in enumerate(source, start=1):
        if not line.strip():
            continue
        try:
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                raise RecordError("invalid_json") from None
            event = parse_event_record(obj, vocabulary)
        except RecordError as exc:
            if strict:
                raise LogFormatError(line_number, exc.reason) from None
            skipped += 1
            errors.append((line_number, exc.reason))
            continue
        events_by_user.setdefault(event.user_id, []).append(event)

    for stream in events_by_user.values():
        stream.sort(key=lambda ev: ev.timestamp_ms)

    return IngestResult(events_by_user=events_by_user, skipped=skipped, errors=errors)


def event_to_record(event: InteractionEvent) -> dict:
    return {
        "user_id": event.user_id,
        "element_id": event.element,
        "timestamp_ms": event.timestamp_ms,
        "role": event.context.role,
        "shift": event.context.shift,
    }


def event_log_lines(events: Iterable[InteractionEvent]) -> list[str]:
    return [json.dumps(event_to_record(ev), sort_keys=True) for ev in events]


def write_event_log(events: Iterable[InteractionEvent], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fp:
        for line in event_log_lines(events):
            fp.write(line)
            fp.write("\n")
