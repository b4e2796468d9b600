"""Raw clickstream log parsing and sessionization.

Input is one event per record (JSONL object or CSV row) with the fields
vehicle_id, session_id, app_id, state_id, timestamp.  Malformed records
are collected with their line numbers instead of aborting the batch.
Sessionization groups events by (session_id, app_id), a session being a
drive, and orders each group by timestamp, input order breaking ties.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import IO, Iterable

from .errors import UnreadableInput
from .model import Walk

FIELDS = ("vehicle_id", "session_id", "app_id", "state_id", "timestamp")
CSV_HEADER = ",".join(FIELDS)

FORMAT_JSONL = "jsonl"
FORMAT_CSV = "csv"


@dataclass(frozen=True)
class LogEvent:
    vehicle_id: str
    session_id: str
    app_id: str
    state_id: str
    timestamp: datetime


@dataclass(frozen=True)
class RejectedLine:
    line_no: int
    reason: str


@dataclass
class ParseReport:
    events: list[LogEvent] = field(default_factory=list)
    rejects: list[RejectedLine] = field(default_factory=list)


def parse_timestamp(value: str) -> datetime:
    """ISO-8601 instant; a trailing Z and missing offset both mean UTC."""
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    parsed = datetime.fromisoformat(text)
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed.astimezone(timezone.utc)


def _event_from_record(record: dict) -> LogEvent:
    for name in FIELDS:
        value = record.get(name)
        if not isinstance(value, str) or not value:
            raise ValueError(f"missing or empty field {name!r}")
    return LogEvent(
        vehicle_id=record["vehicle_id"],
        session_id=record["session_id"],
        app_id=record["app_id"],
        state_id=record["state_id"],
        timestamp=parse_timestamp(record["timestamp"]),
    )


def parse_events(stream: IO[str] | Iterable[str], format: str = FORMAT_JSONL) -> ParseReport:
    """Parse an event stream; never raises on bad records, only on bad I/O."""
    if format == FORMAT_JSONL:
        return _parse_jsonl(stream)
    if format == FORMAT_CSV:
        return _parse_csv(stream)
    raise ValueError(f"unknown format {format!r}")


def _parse_jsonl(stream) -> ParseReport:
    report = ParseReport()
    try:
        for line_no, line in enumerate(stream, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                if not isinstance(record, dict):
                    raise ValueError("record is not an object")
                report.events.append(_event_from_record(record))
            except ValueError as exc:
                report.rejects.append(RejectedLine(line_no, str(exc)))
    except (OSError, UnicodeDecodeError) as exc:
        raise UnreadableInput(str(exc)) from exc
    return report


def _parse_csv(stream) -> ParseReport:
    report = ParseReport()
    try:
        reader = csv.DictReader(stream)
        if reader.fieldnames is None:
            return report
        missing = [f for f in FIELDS if f not in reader.fieldnames]
        if missing:
            report.rejects.append(
                RejectedLine(1, f"header lacks fields {missing}")
            )
            return report
        for record in reader:
            line_no = reader.line_num
            try:
                report.events.append(_event_from_record(
                    {k: record.get(k) for k in FIELDS}
                ))
            except ValueError as exc:
                report.rejects.append(RejectedLine(line_no, str(exc)))
    except (OSError, UnicodeDecodeError, csv.Error) as exc:
        raise UnreadableInput(str(exc)) from exc
    return report


def parse_path(path, format: str) -> ParseReport:
    try:
        handle = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise UnreadableInput(f"{path}: {exc}") from exc
    with handle:
        return parse_events(handle, format)


def sessionize(events: Iterable[LogEvent], *, collapse_repeats: bool = False) -> list[Walk]:
    """Group events into one walk per (session, app), ordered by timestamp.

    The sort is stable, so events with equal timestamps keep their input
    order.  ``collapse_repeats`` drops consecutive duplicate states (they
    would otherwise become self-loop cycles).  Walks come out sorted by
    (session_id, app_id).
    """
    groups: dict[tuple[str, str], list[LogEvent]] = {}
    for event in events:
        groups.setdefault((event.session_id, event.app_id), []).append(event)
    walks = []
    for (session_id, app_id) in sorted(groups):
        ordered = sorted(groups[(session_id, app_id)], key=lambda e: e.timestamp)
        vertices = [e.state_id for e in ordered]
        timestamps = [e.timestamp for e in ordered]
        if collapse_repeats:
            kept = [0] + [i for i in range(1, len(vertices))
                          if vertices[i] != vertices[i - 1]]
            vertices = [vertices[i] for i in kept]
            timestamps = [timestamps[i] for i in kept]
        walks.append(Walk(
            drive_id=session_id,
            vehicle_id=ordered[0].vehicle_id,
            app_id=app_id,
            vertices=tuple(vertices),
            timestamps=tuple(timestamps),
        ))
    return walks


def events_to_jsonl(events: Iterable[LogEvent]) -> str:
    """Serialize events back to the JSONL interchange form."""
    out = io.StringIO()
    for e in events:
        out.write(json.dumps({
            "vehicle_id": e.vehicle_id,
            "session_id": e.session_id,
            "app_id": e.app_id,
            "state_id": e.state_id,
            "timestamp": e.timestamp.isoformat().replace("+00:00", "Z"),
        }, separators=(",", ":"), ensure_ascii=False))
        out.write("\n")
    return out.getvalue()
