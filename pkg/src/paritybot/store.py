"""Append-only system of record for analyzed tweets.

One directory per election holds JSON Lines segment files
(``records-<seq>.jsonl``); a record is a tweet joined with its cleaned forms,
scores (or the scoring-failed marker) and decision. Records are immutable
once appended and deduplicated by tweet id. Analytics re-queries this log at
arbitrary thresholds, which is why everything is retained.
"""

import json
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Iterator

from .common import format_rfc3339, parse_rfc3339
from .engine import Decision, decision_from_json, decision_to_json
from .errors import ParityError
from .ingest import CleanTweet, RawTweet, tweet_to_json
from .scorer import SCORING_FAILED, AttributeScores

SEGMENT_MAX_RECORDS = 5000


@dataclass(frozen=True)
class StoredRecord:
    raw: RawTweet
    clean: CleanTweet
    scores: AttributeScores | None  # None encodes the SCORING_FAILED marker
    decision: Decision | None
    stored_at: datetime

    def __post_init__(self):
        if (self.scores is None) != (self.decision is None):
            raise ParityError("STORAGE_IO", "scores and decision must be present together")

    @property
    def toxicity(self) -> float | None:
        return self.scores.toxicity if self.scores is not None else None


@dataclass(frozen=True)
class QueryFilter:
    candidate_handle: str | None = None
    since: datetime | None = None  # inclusive
    until: datetime | None = None  # exclusive
    min_toxicity: float | None = None  # strict >
    text_contains: str | None = None  # case-insensitive, over matching_text

    def matches(self, record: StoredRecord) -> bool:
        if self.candidate_handle is not None and self.candidate_handle not in record.raw.mentioned_handles:
            return False
        if self.since is not None and record.raw.created_at < self.since:
            return False
        if self.until is not None and record.raw.created_at >= self.until:
            return False
        if self.min_toxicity is not None:
            if record.scores is None or record.scores.toxicity <= self.min_toxicity:
                return False
        if self.text_contains is not None:
            if self.text_contains.lower() not in record.clean.matching_text:
                return False
        return True


def record_to_json(record: StoredRecord) -> dict:
    return {
        "raw": tweet_to_json(record.raw),
        "clean": {
            "tweet_id": record.clean.tweet_id,
            "scoring_text": record.clean.scoring_text,
            "matching_text": record.clean.matching_text,
        },
        "scores": (
            {
                "scores": record.scores.scores,
                "provider_id": record.scores.provider_id,
                "model_version": record.scores.model_version,
            }
            if record.scores is not None
            else SCORING_FAILED
        ),
        "decision": decision_to_json(record.decision) if record.decision is not None else None,
        "stored_at": format_rfc3339(record.stored_at),
    }


def record_from_json(obj: dict) -> StoredRecord:
    raw = obj["raw"]
    clean = obj["clean"]
    scores = obj["scores"]
    return StoredRecord(
        raw=RawTweet(
            id=raw["id"],
            created_at=parse_rfc3339(raw["created_at"]),
            author_handle=raw["author_handle"],
            text=raw["text"],
            mentioned_handles=tuple(raw.get("mentioned_handles", [])),
            in_reply_to=raw.get("in_reply_to"),
        ),
        clean=CleanTweet(
            tweet_id=clean["tweet_id"],
            scoring_text=clean["scoring_text"],
            matching_text=clean["matching_text"],
        ),
        scores=(
            AttributeScores(
                scores=scores["scores"],
                provider_id=scores["provider_id"],
                model_version=scores["model_version"],
            )
            if scores != SCORING_FAILED
            else None
        ),
        decision=decision_from_json(obj["decision"]) if obj.get("decision") else None,
        stored_at=parse_rfc3339(obj["stored_at"]),
    )


class Store:
    """Single-writer, many-reader log for one election.

    The id index and record list are rebuilt from the segment files on open;
    readers iterate over a consistent prefix (the length at call time).
    """

    def __init__(self, directory: str | Path, create: bool = True):
        self.directory = Path(directory)
        if create:
            self.directory.mkdir(parents=True, exist_ok=True)
        elif not self.directory.is_dir():
            raise ParityError("STORAGE_IO", f"store directory not found: {self.directory}")
        self._records: list[StoredRecord] = []
        self._ids: set[str] = set()
        self._segment_seq = 0
        self._segment_count = 0
        self._fh = None
        self._open_existing()

    def _segment_path(self, seq: int) -> Path:
        return self.directory / f"records-{seq:04d}.jsonl"

    def _open_existing(self) -> None:
        segments = sorted(self.directory.glob("records-*.jsonl"))
        for segment in segments:
            count = 0
            for lineno, line in enumerate(segment.read_text(encoding="utf-8").splitlines(), start=1):
                if not line.strip():
                    continue
                try:
                    record = record_from_json(json.loads(line))
                except (ValueError, KeyError) as exc:
                    raise ParityError("STORAGE_IO", f"{segment.name} line {lineno}: {exc}")
                self._records.append(record)
                self._ids.add(record.raw.id)
                count += 1
            self._segment_seq = int(segment.stem.split("-")[1])
            self._segment_count = count

    def _writer(self):
        if self._fh is not None and self._segment_count >= SEGMENT_MAX_RECORDS:
            self._fh.close()
            self._fh = None
        if self._fh is None:
            if self._segment_seq == 0:
                self._segment_seq = 1
            elif self._segment_count >= SEGMENT_MAX_RECORDS:
                self._segment_seq += 1
                self._segment_count = 0
            self._fh = self._segment_path(self._segment_seq).open("a", encoding="utf-8")
        return self._fh

    def append(self, record: StoredRecord) -> str:
        """Durably append unless the tweet id already exists; returns
        "appended" or "deduplicated"."""
        if record.raw.id in self._ids:
            return "deduplicated"
        try:
            fh = self._writer()
            fh.write(json.dumps(record_to_json(record), ensure_ascii=False) + "\n")
            fh.flush()
        except OSError as exc:
            raise ParityError("STORAGE_IO", f"append failed: {exc}") from exc
        self._records.append(record)
        self._ids.add(record.raw.id)
        self._segment_count += 1
        return "appended"

    def query(self, flt: QueryFilter | None = None) -> Iterator[StoredRecord]:
        """Records matching every supplied predicate, in append order."""
        flt = flt or QueryFilter()
        snapshot_len = len(self._records)
        for i in range(snapshot_len):
            record = self._records[i]
            if flt.matches(record):
                yield record

    def count(self, flt: QueryFilter | None = None) -> int:
        return sum(1 for _ in self.query(flt))

    def contains(self, tweet_id: str) -> bool:
        return tweet_id in self._ids

    def get(self, tweet_id: str) -> StoredRecord | None:
        if tweet_id not in self._ids:
            return None
        for record in self._records:
            if record.raw.id == tweet_id:
                return record
        return None

    def __len__(self) -> int:
        return len(self._records)

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None


class StoreRegistry:
    """Election id -> Store, laid out as subdirectories of one root."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._stores: dict[str, Store] = {}

    def open(self, election_id: str, create: bool = False) -> Store:
        if election_id not in self._stores:
            directory = self.root / election_id
            if not create and not directory.is_dir():
                raise ParityError("UNKNOWN_ELECTION", f"no records for election {election_id!r}")
            self._stores[election_id] = Store(directory, create=True)
        return self._stores[election_id]

    def election_ids(self) -> list[str]:
        on_disk = {p.name for p in self.root.glob("*") if p.is_dir()}
        return sorted(on_disk | set(self._stores))

    def close(self) -> None:
        for store in self._stores.values():
            store.close()
