import tempfile
from pathlib import Path

import pytest
from conftest import make_tweet, ts
from hypothesis import given, settings
from hypothesis import strategies as st

from paritybot.engine import Action, Decision
from paritybot.errors import ParityError
from paritybot.ingest import clean
from paritybot.scorer import AttributeScores
from paritybot.store import (
    QueryFilter,
    Store,
    StoreRegistry,
    StoredRecord,
    record_from_json,
    record_to_json,
)


def _scores(toxicity: float) -> AttributeScores:
    return AttributeScores(scores={"TOXICITY": toxicity}, provider_id="lexicon", model_version="1")


def _record(
    tweet_id: str,
    toxicity: float | None = 0.5,
    text: str = "hello out there",
    handle: str = "cathmckenna",
    at=None,
    action: Action = Action.NONE,
) -> StoredRecord:
    raw = make_tweet(tweet_id, text, (handle,), at=at or ts(1, 12))
    cleaned = clean(raw)
    if toxicity is None:
        return StoredRecord(raw=raw, clean=cleaned, scores=None, decision=None, stored_at=raw.created_at)
    decision = Decision(
        tweet_id=tweet_id,
        candidate_handle=handle,
        toxicity=toxicity,
        threshold_in_effect=0.9,
        flagged=toxicity > 0.9,
        action=action,
        positivtweet_id=1 if action is Action.POSTED else None,
        decided_at=raw.created_at,
        suppress_reason=None,
    )
    return StoredRecord(raw=raw, clean=cleaned, scores=_scores(toxicity), decision=decision, stored_at=raw.created_at)


class TestRecordInvariants:
    def test_scores_without_decision_rejected(self):
        raw = make_tweet("t1", "x", ("a",))
        with pytest.raises(ParityError):
            StoredRecord(raw=raw, clean=clean(raw), scores=_scores(0.5), decision=None, stored_at=ts(1))

    def test_json_round_trip(self):
        record = _record("t1", 0.93, action=Action.POSTED)
        assert record_from_json(record_to_json(record)) == record

    def test_json_round_trip_scoring_failed(self):
        record = _record("t2", None)
        encoded = record_to_json(record)
        assert encoded["scores"] == "SCORING_FAILED"
        assert encoded["decision"] is None
        assert record_from_json(encoded) == record


class TestAppend:
    def test_write_read_identity(self, empty_store):
        record = _record("t1", 0.42)
        assert empty_store.append(record) == "appended"
        assert empty_store.get("t1") == record

    def test_duplicate_id_deduplicated(self, empty_store):
        record = _record("t1")
        empty_store.append(record)
        assert empty_store.append(_record("t1", 0.99)) == "deduplicated"
        assert len(empty_store) == 1
        assert empty_store.get("t1").toxicity == 0.5

    def test_durability_across_reopen(self, tmp_path):
        directory = tmp_path / "store"
        store = Store(directory)
        for i in range(5):
            store.append(_record(f"t{i}", 0.1 * i, at=ts(1, 12, i)))
        store.close()

        reopened = Store(directory)
        assert len(reopened) == 5
        assert [r.raw.id for r in reopened.query()] == [f"t{i}" for i in range(5)]
        assert reopened.contains("t3")
        assert not reopened.contains("t9")

    def test_segment_rotation(self, tmp_path, monkeypatch):
        monkeypatch.setattr("paritybot.store.SEGMENT_MAX_RECORDS", 3)
        store = Store(tmp_path / "store")
        for i in range(7):
            store.append(_record(f"t{i}"))
        store.close()
        segments = sorted(p.name for p in (tmp_path / "store").glob("records-*.jsonl"))
        assert segments == ["records-0001.jsonl", "records-0002.jsonl", "records-0003.jsonl"]
        lengths = [
            len((tmp_path / "store" / name).read_text(encoding="utf-8").splitlines())
            for name in segments
        ]
        assert lengths == [3, 3, 1]

    def test_reopen_with_full_tail_segment_rotates(self, tmp_path, monkeypatch):
        monkeypatch.setattr("paritybot.store.SEGMENT_MAX_RECORDS", 3)
        directory = tmp_path / "store"
        store = Store(directory)
        for i in range(3):
            store.append(_record(f"t{i}"))
        store.close()

        reopened = Store(directory)
        reopened.append(_record("t3"))
        reopened.close()
        first = (directory / "records-0001.jsonl").read_text(encoding="utf-8").splitlines()
        second = (directory / "records-0002.jsonl").read_text(encoding="utf-8").splitlines()
        assert len(first) == 3
        assert len(second) == 1
        assert len(Store(directory)) == 4


class TestQuery:
    def _ten_record_store(self, store):
        # 3 of 10 strictly above 0.9; one sits exactly at 0.9.
        values = [0.05, 0.91, 0.2, 0.9, 0.95, 0.4, 0.97, 0.6, 0.7, 0.3]
        for i, value in enumerate(values):
            store.append(_record(f"t{i}", value, at=ts(1, 12, i)))
        return store

    def test_min_toxicity_fixture(self, empty_store):
        store = self._ten_record_store(empty_store)
        assert store.count(QueryFilter(min_toxicity=0.9)) == 3

    def test_min_toxicity_strict(self, empty_store):
        store = self._ten_record_store(empty_store)
        above = {r.raw.id for r in store.query(QueryFilter(min_toxicity=0.9))}
        assert "t3" not in above  # exactly 0.9
        assert above == {"t1", "t4", "t6"}

    def test_empty_store_any_filter(self, empty_store):
        assert list(empty_store.query(QueryFilter(min_toxicity=0.0, text_contains="x"))) == []

    def test_no_predicates_returns_everything_once(self, empty_store):
        store = self._ten_record_store(empty_store)
        ids = [r.raw.id for r in store.query()]
        assert len(ids) == 10
        assert len(set(ids)) == 10

    def test_text_contains_case_insensitive(self, empty_store):
        empty_store.append(_record("t1", 0.568, text="cindy stfu please", handle="jacindaardern"))
        assert empty_store.count(QueryFilter(text_contains="CINDY")) == 1
        assert empty_store.count(QueryFilter(text_contains="cindy")) == 1
        assert empty_store.count(QueryFilter(text_contains="kamala")) == 0

    def test_candidate_handle_filter(self, empty_store):
        empty_store.append(_record("t1", handle="cathmckenna"))
        empty_store.append(_record("t2", handle="jacindaardern"))
        assert [r.raw.id for r in empty_store.query(QueryFilter(candidate_handle="jacindaardern"))] == ["t2"]

    def test_time_range_since_inclusive_until_exclusive(self, empty_store):
        for i in range(4):
            empty_store.append(_record(f"t{i}", at=ts(1, 12, i)))
        flt = QueryFilter(since=ts(1, 12, 1), until=ts(1, 12, 3))
        assert [r.raw.id for r in empty_store.query(flt)] == ["t1", "t2"]

    def test_scoring_failed_excluded_from_toxicity_filters(self, empty_store):
        empty_store.append(_record("ok", 0.95))
        empty_store.append(_record("failed", None))
        assert empty_store.count() == 2
        assert empty_store.count(QueryFilter(min_toxicity=0.5)) == 1

    def test_count_equals_query_length(self, empty_store):
        store = self._ten_record_store(empty_store)
        for flt in (None, QueryFilter(min_toxicity=0.5), QueryFilter(text_contains="hello")):
            assert store.count(flt) == len(list(store.query(flt)))

    @settings(deadline=None, max_examples=20)
    @given(
        values=st.lists(st.floats(min_value=0.0, max_value=1.0, allow_nan=False), min_size=0, max_size=40),
        a=st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
        b=st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
    )
    def test_monotone_rethresholding(self, values, a, b):
        low, high = min(a, b), max(a, b)
        with tempfile.TemporaryDirectory() as tmp:
            store = Store(Path(tmp) / "s")
            for i, value in enumerate(values):
                store.append(_record(f"t{i}", value, at=ts(1, 12, i % 60)))
            assert store.count(QueryFilter(min_toxicity=high)) <= store.count(QueryFilter(min_toxicity=low))
            store.close()


class TestRegistry:
    def test_unknown_election(self, tmp_path):
        registry = StoreRegistry(tmp_path)
        with pytest.raises(ParityError) as err:
            registry.open("nz2020")
        assert err.value.code == "UNKNOWN_ELECTION"

    def test_create_then_reopen(self, tmp_path):
        registry = StoreRegistry(tmp_path)
        store = registry.open("ca2019", create=True)
        store.append(_record("t1"))
        registry.close()

        fresh = StoreRegistry(tmp_path)
        assert fresh.election_ids() == ["ca2019"]
        assert len(fresh.open("ca2019")) == 1
