"""Stimulus presentation sequences and synchronization schedules.

A sequence is a list of timed items on named tracks (e.g. visual,
auditory); items on one track may not overlap, items on different tracks
may.  A schedule is the flat chronological stream of onset/offset events.
"""

import json
from dataclasses import dataclass

from .errors import ValidationError

ONSET = "Onset"
OFFSET = "Offset"


@dataclass(frozen=True)
class SequenceItem:
    stimulus: str
    track: str
    start_ms: int
    duration_ms: int


@dataclass(frozen=True)
class StimulusSequence:
    items: tuple
    total_ms: int


@dataclass(frozen=True)
class SyncEvent:
    timestamp_ms: int
    kind: str  # Onset | Offset
    stimulus: str
    track: str


def _validate_items(items):
    by_track = {}
    for item in items:
        if item.duration_ms <= 0:
            raise ValidationError(
                f"item {item.stimulus} has non-positive duration {item.duration_ms}"
            )
        if item.start_ms < 0:
            raise ValidationError(
                f"item {item.stimulus} has negative start {item.start_ms}"
            )
        by_track.setdefault(item.track, []).append(item)
    for track, track_items in by_track.items():
        track_items.sort(key=lambda i: i.start_ms)
        for prev, cur in zip(track_items, track_items[1:]):
            if cur.start_ms < prev.start_ms + prev.duration_ms:
                raise ValidationError(
                    f"track {track!r}: items {prev.stimulus} and "
                    f"{cur.stimulus} overlap"
                )


def make_sequence(items):
    """Validate and assemble items into a StimulusSequence."""
    items = tuple(
        sorted(items, key=lambda i: (i.track, i.start_ms))
    )
    _validate_items(items)
    total = max((i.start_ms + i.duration_ms for i in items), default=0)
    return StimulusSequence(items=items, total_ms=total)


def build_sequence(results, count, duration_ms, isi_ms=0, track="visual"):
    """Take the top `count` ranked entries; item k starts at
    k * (duration + isi), all on one track."""
    if count <= 0:
        raise ValidationError("count must be positive")
    if duration_ms <= 0:
        raise ValidationError("duration must be positive")
    if isi_ms < 0:
        raise ValidationError("inter-stimulus interval must be non-negative")
    entries = results.entries if hasattr(results, "entries") else tuple(results)
    if count > len(entries):
        raise ValidationError(
            f"requested {count} items but only {len(entries)} results available"
        )
    items = []
    for k, entry in enumerate(entries[:count]):
        stimulus = entry[0] if isinstance(entry, tuple) else entry
        items.append(
            SequenceItem(
                stimulus=stimulus,
                track=track,
                start_ms=k * (duration_ms + isi_ms),
                duration_ms=duration_ms,
            )
        )
    return make_sequence(items)


def merge_sequences(a, b):
    """Union of two sequences; same-track items must not overlap."""
    return make_sequence(a.items + b.items)


def emit_schedule(seq):
    """2 * |items| onset/offset events, chronologically sorted (ties:
    Offset before Onset, then by track label)."""
    events = []
    for item in seq.items:
        events.append(SyncEvent(item.start_ms, ONSET, item.stimulus, item.track))
        events.append(
            SyncEvent(item.start_ms + item.duration_ms, OFFSET, item.stimulus,
                      item.track)
        )
    events.sort(key=lambda e: (e.timestamp_ms, e.kind != OFFSET, e.track))
    return events


def items_from_schedule(events):
    """Reconstruct the item list from an event stream (inverse of
    emit_schedule for valid sequences)."""
    open_items = {}
    items = []
    for e in events:
        key = (e.track, e.stimulus)
        if e.kind == ONSET:
            if key in open_items:
                raise ValidationError(f"nested onset for {key}")
            open_items[key] = e.timestamp_ms
        else:
            if key not in open_items:
                raise ValidationError(f"offset without onset for {key}")
            start = open_items.pop(key)
            items.append(
                SequenceItem(e.stimulus, e.track, start, e.timestamp_ms - start)
            )
    if open_items:
        raise ValidationError(f"unclosed items: {sorted(open_items)}")
    return items


def sequence_to_json(seq):
    return json.dumps(
        {
            "items": [
                {
                    "stimulus": i.stimulus,
                    "track": i.track,
                    "startMs": i.start_ms,
                    "durationMs": i.duration_ms,
                }
                for i in seq.items
            ],
            "totalMs": seq.total_ms,
        },
        indent=2,
    )


def schedule_to_tsv(events):
    return "".join(
        f"{e.timestamp_ms}\t{e.kind}\t{e.track}\t{e.stimulus}\n" for e in events
    )
