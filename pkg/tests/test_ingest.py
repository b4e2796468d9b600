import io
import random
from datetime import datetime, timedelta, timezone

import pytest
from hypothesis import given, settings, strategies as st

from walkcomp import UnreadableInput, parse_events, sessionize
from walkcomp.ingest import (
    CSV_HEADER,
    FORMAT_CSV,
    FORMAT_JSONL,
    LogEvent,
    events_to_jsonl,
    parse_timestamp,
)

T0 = datetime(2024, 3, 1, 12, 0, 0, tzinfo=timezone.utc)


def jsonl_line(vehicle="v1", session="s1", app="nav", state="S1",
               ts="2024-03-01T12:00:00Z"):
    return ('{"vehicle_id":"%s","session_id":"%s","app_id":"%s",'
            '"state_id":"%s","timestamp":"%s"}' % (vehicle, session, app, state, ts))


class TestParseEvents:
    def test_three_valid_jsonl_lines(self):
        text = "\n".join(jsonl_line(state=f"S{i}") for i in range(3))
        report = parse_events(io.StringIO(text), FORMAT_JSONL)
        assert len(report.events) == 3 and not report.rejects

    def test_missing_state_id_rejected_with_line_number(self):
        lines = [jsonl_line(),
                 '{"vehicle_id":"v1","session_id":"s1","app_id":"nav","timestamp":"2024-03-01T12:00:00Z"}',
                 jsonl_line(state="S2")]
        report = parse_events(io.StringIO("\n".join(lines)), FORMAT_JSONL)
        assert len(report.events) == 2
        assert len(report.rejects) == 1
        assert report.rejects[0].line_no == 2
        assert "state_id" in report.rejects[0].reason

    def test_invalid_json_and_bad_timestamp_rejected(self):
        lines = ["{broken", jsonl_line(ts="yesterday"), jsonl_line()]
        report = parse_events(io.StringIO("\n".join(lines)), FORMAT_JSONL)
        assert len(report.events) == 1
        assert [r.line_no for r in report.rejects] == [1, 2]

    def test_csv_and_jsonl_parse_identically(self):
        rows = [("v1", "s1", "nav", "S1", "2024-03-01T12:00:00Z"),
                ("v1", "s1", "nav", "S2", "2024-03-01T12:00:05Z"),
                ("v2", "s2", "media", "S9", "2024-03-01T13:00:00Z")]
        jsonl = "\n".join(jsonl_line(*row) for row in rows)
        csv_text = CSV_HEADER + "\n" + "\n".join(",".join(row) for row in rows)
        from_jsonl = parse_events(io.StringIO(jsonl), FORMAT_JSONL).events
        from_csv = parse_events(io.StringIO(csv_text), FORMAT_CSV).events
        assert from_jsonl == from_csv

    def test_csv_quoting(self):
        csv_text = (CSV_HEADER + "\n"
                    + 'v1,s1,nav,"S,comma",2024-03-01T12:00:00Z')
        events = parse_events(io.StringIO(csv_text), FORMAT_CSV).events
        assert events[0].state_id == "S,comma"

    def test_csv_bad_header_reported(self):
        report = parse_events(io.StringIO("a,b\n1,2"), FORMAT_CSV)
        assert not report.events and report.rejects

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            parse_events(io.StringIO(""), "xml")

    def test_io_failure_raises_unreadable(self):
        class Boom:
            def __iter__(self):
                raise OSError("disk gone")

        with pytest.raises(UnreadableInput):
            parse_events(Boom(), FORMAT_JSONL)

    def test_round_trip_through_jsonl_writer(self):
        events = [LogEvent("v1", "s1", "nav", f"S{i}", T0 + timedelta(seconds=i))
                  for i in range(4)]
        text = events_to_jsonl(events)
        assert parse_events(io.StringIO(text), FORMAT_JSONL).events == events


class TestParseTimestamp:
    def test_z_suffix_and_offset_agree(self):
        assert parse_timestamp("2024-03-01T12:00:00Z") == \
            parse_timestamp("2024-03-01T12:00:00+00:00")

    def test_naive_treated_as_utc(self):
        assert parse_timestamp("2024-03-01T12:00:00").tzinfo == timezone.utc

    def test_offset_normalized_to_utc(self):
        assert parse_timestamp("2024-03-01T14:00:00+02:00") == T0


def _event(session, app, state, seconds, vehicle="v1"):
    return LogEvent(vehicle, session, app, state, T0 + timedelta(seconds=seconds))


class TestSessionize:
    def test_two_sessions_times_two_apps(self):
        events = [_event(s, a, "S1", i)
                  for i, (s, a) in enumerate(
                      (s, a) for s in ("s1", "s2") for a in ("nav", "media"))]
        walks = sessionize(events)
        assert len(walks) == 4
        assert [(w.drive_id, w.app_id) for w in walks] == [
            ("s1", "media"), ("s1", "nav"), ("s2", "media"), ("s2", "nav")]

    def test_equal_timestamps_keep_input_order(self):
        events = [_event("s1", "nav", "S1", 0),
                  _event("s1", "nav", "S2", 0),
                  _event("s1", "nav", "S3", 0)]
        walks = sessionize(events)
        assert walks[0].vertices == ("S1", "S2", "S3")

    def test_shuffled_input_gives_identical_walks(self):
        events = [_event("s1", "nav", f"S{i}", i) for i in range(10)]
        events += [_event("s2", "media", f"T{i}", i) for i in range(5)]
        shuffled = events[:]
        random.Random(4).shuffle(shuffled)
        assert sessionize(events) == sessionize(shuffled)

    def test_collapse_repeats(self):
        events = [_event("s1", "nav", s, i)
                  for i, s in enumerate(["A", "A", "B", "B", "B", "A"])]
        plain = sessionize(events)[0]
        collapsed = sessionize(events, collapse_repeats=True)[0]
        assert plain.vertices == ("A", "A", "B", "B", "B", "A")
        assert collapsed.vertices == ("A", "B", "A")
        assert collapsed.timestamps == (plain.timestamps[0],
                                        plain.timestamps[2],
                                        plain.timestamps[5])

    def test_walk_timestamps_non_decreasing(self):
        events = [_event("s1", "nav", f"S{i}", 100 - i) for i in range(5)]
        walk = sessionize(events)[0]
        assert list(walk.timestamps) == sorted(walk.timestamps)
        assert walk.vertices == ("S4", "S3", "S2", "S1", "S0")

    @given(st.lists(
        st.tuples(st.sampled_from(["s1", "s2", "s3"]),
                  st.sampled_from(["nav", "media"]),
                  st.sampled_from(["A", "B", "C"]),
                  st.integers(min_value=0, max_value=500)),
        min_size=1, max_size=40))
    @settings(max_examples=100)
    def test_event_count_equals_total_walk_length(self, rows):
        events = [_event(s, a, v, t) for s, a, v, t in rows]
        walks = sessionize(events)
        assert sum(len(w.vertices) for w in walks) == len(events)

    @given(st.lists(
        st.tuples(st.sampled_from(["s1", "s2"]),
                  st.sampled_from(["nav", "media"]),
                  st.sampled_from(["A", "B", "C"])),
        min_size=1, max_size=30).map(
            lambda rows: [(s, a, v, i) for i, (s, a, v) in enumerate(rows)]))
    @settings(max_examples=100)
    def test_permutation_invariance_with_distinct_timestamps(self, rows):
        events = [_event(s, a, v, t) for s, a, v, t in rows]
        shuffled = events[:]
        random.Random(0).shuffle(shuffled)
        assert sessionize(events) == sessionize(shuffled)
