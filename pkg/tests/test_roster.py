from datetime import datetime, timezone

import pytest
from hypothesis import given
from hypothesis import strategies as st
from conftest import make_election

from paritybot.errors import ParityError
from paritybot.roster import (
    Election,
    Gender,
    RateCaps,
    ResponseMode,
    load_roster,
    normalize_handle,
    save_roster,
)

UTC = timezone.utc


class TestNormalizeHandle:
    def test_strips_at_and_lowercases(self):
        assert normalize_handle("@CathMcKenna") == "cathmckenna"

    def test_fixed_point(self):
        assert normalize_handle("jacindaardern") == "jacindaardern"

    def test_spaces_rejected(self):
        with pytest.raises(ParityError) as err:
            normalize_handle("has spaces")
        assert err.value.code == "MALFORMED_HANDLE"

    def test_too_long_rejected(self):
        with pytest.raises(ParityError):
            normalize_handle("a" * 16)

    def test_empty_rejected(self):
        with pytest.raises(ParityError):
            normalize_handle("   ")

    @given(st.from_regex(r"@?[A-Za-z0-9_]{1,15}", fullmatch=True))
    def test_idempotent_on_accepted_input(self, raw):
        once = normalize_handle(raw)
        assert normalize_handle(once) == once


ROSTER_HEADER = "display_name,handle,gender,election_id,verification_note\n"


def write_roster(tmp_path, rows):
    path = tmp_path / "roster.csv"
    path.write_text(ROSTER_HEADER + "".join(rows), encoding="utf-8")
    return path


class TestLoadRoster:
    def test_loads_ninety_rows(self, tmp_path):
        rows = [f"Person {i},handle{i:03d},woman,ca2019,checked\n" for i in range(90)]
        path = write_roster(tmp_path, rows)
        candidates = load_roster(path, "ca2019")
        assert len(candidates) == 90
        assert all(c.gender is Gender.WOMAN for c in candidates)

    def test_header_only_is_empty(self, tmp_path):
        path = write_roster(tmp_path, [])
        assert load_roster(path, "ca2019") == []

    def test_normalization_collision_is_duplicate(self, tmp_path):
        path = write_roster(
            tmp_path,
            ["A,@CathMcKenna,woman,ca2019,x\n", "B,cathmckenna,woman,ca2019,y\n"],
        )
        with pytest.raises(ParityError) as err:
            load_roster(path, "ca2019")
        assert err.value.code == "DUPLICATE_HANDLE"

    def test_duplicate_across_elections_allowed(self, tmp_path):
        path = write_roster(
            tmp_path,
            ["A,samehandle,woman,ca2019,x\n", "A,samehandle,woman,nz2020,x\n"],
        )
        assert len(load_roster(path, "ca2019")) == 1
        assert len(load_roster(path, "nz2020")) == 1

    def test_other_election_rows_ignored(self, tmp_path):
        path = write_roster(
            tmp_path, ["A,aaa,woman,ca2019,x\n", "B,bbb,woman,nz2020,x\n"]
        )
        assert [c.handle for c in load_roster(path, "ca2019")] == ["aaa"]

    def test_missing_column_rejected(self, tmp_path):
        path = tmp_path / "roster.csv"
        path.write_text("display_name,handle\nA,aaa\n", encoding="utf-8")
        with pytest.raises(ParityError) as err:
            load_roster(path, "ca2019")
        assert err.value.code == "MISSING_FIELD"

    def test_empty_gender_defaults_to_unknown(self, tmp_path):
        path = write_roster(tmp_path, ["A,aaa,,ca2019,x\n"])
        assert load_roster(path, "ca2019")[0].gender is Gender.UNKNOWN

    def test_unknown_gender_value_rejected(self, tmp_path):
        path = write_roster(tmp_path, ["A,aaa,robot,ca2019,x\n"])
        with pytest.raises(ParityError):
            load_roster(path, "ca2019")

    def test_round_trip_stability(self, tmp_path):
        rows = [
            "Catherine McKenna,@CathMcKenna,woman,ca2019,manually confirmed\n",
            "Someone Else,other_handle,unknown,ca2019,\n",
        ]
        first = load_roster(write_roster(tmp_path, rows), "ca2019")
        out = tmp_path / "again.csv"
        save_roster(first, out)
        assert load_roster(out, "ca2019") == first


class TestElection:
    def test_days_in_operation(self):
        ca = make_election(
            start=datetime(2019, 9, 18, tzinfo=UTC), end=datetime(2019, 10, 21, tzinfo=UTC)
        )
        assert ca.days_in_operation == 33
        nz = make_election(
            start=datetime(2020, 6, 28, tzinfo=UTC), end=datetime(2020, 9, 20, tzinfo=UTC)
        )
        assert nz.days_in_operation == 84
        us = make_election(
            start=datetime(2020, 9, 14, tzinfo=UTC), end=datetime(2020, 11, 3, tzinfo=UTC)
        )
        assert us.days_in_operation == 50

    def test_empty_schedule_rejected(self):
        with pytest.raises(ParityError) as err:
            Election(
                id="x",
                name="x",
                country="X",
                start_at=datetime(2020, 1, 1, tzinfo=UTC),
                end_at=datetime(2020, 2, 1, tzinfo=UTC),
                threshold_schedule=(),
                analysis_threshold_default=0.9,
                response_mode=ResponseMode.OWN_TIMELINE,
                rate_caps=RateCaps(1, 1, 1),
            )
        assert err.value.code == "INVALID_SCHEDULE"

    def test_non_increasing_schedule_rejected(self):
        t = datetime(2020, 1, 5, tzinfo=UTC)
        with pytest.raises(ParityError):
            make_election(schedule=[(t, 0.8), (t, 0.9)])

    def test_threshold_outside_unit_interval_rejected(self):
        with pytest.raises(ParityError):
            make_election(schedule=[(datetime(2020, 1, 1, tzinfo=UTC), 1.0)])

    def test_start_after_end_rejected(self):
        with pytest.raises(ParityError) as err:
            make_election(
                start=datetime(2020, 2, 1, tzinfo=UTC), end=datetime(2020, 1, 1, tzinfo=UTC)
            )
        assert err.value.code == "INVALID_ELECTION"

    def test_rate_caps_must_be_positive(self):
        with pytest.raises(ParityError) as err:
            RateCaps(per_day=0, window_seconds=900, window_cap=15)
        assert err.value.code == "INVALID_RATE_CAPS"
