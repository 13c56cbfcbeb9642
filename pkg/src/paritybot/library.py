"""The positivtweet library: curated seeds plus a crowdsource-intake lifecycle.

Curated imports are born APPROVED; crowdsourced submissions start PENDING and
reach the live sampling pool only through a human review. APPROVED and
REJECTED are terminal. Rejected texts are kept for audit.
"""

import json
import os
import threading
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Callable

from .common import format_rfc3339, parse_rfc3339
from .errors import ParityError

MAX_TWEET_LEN = 280

KNOWN_LANGUAGE_TAGS = {"en", "fr", "mi"}


class Origin(Enum):
    CURATED = "CURATED"
    CROWDSOURCED = "CROWDSOURCED"


class State(Enum):
    PENDING = "PENDING"
    APPROVED = "APPROVED"
    REJECTED = "REJECTED"


class Verdict(Enum):
    APPROVE = "APPROVE"
    REJECT = "REJECT"


@dataclass(frozen=True)
class PositivTweet:
    id: int
    text: str
    language_tags: tuple[str, ...]
    origin: Origin
    state: State
    attribution: str | None = None
    submitted_at: datetime | None = None
    reviewed_at: datetime | None = None
    edited_text: str | None = None

    @property
    def effective_text(self) -> str:
        return self.edited_text if self.edited_text is not None else self.text


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class PositivLibrary:
    """In-memory library with an optional snapshot file.

    Mutations are serialized under one lock; the snapshot is rewritten
    atomically after every change, so a restart resumes from the last
    reviewed state. Libraries are small, so a full rewrite is cheap.
    """

    def __init__(self, path: str | Path | None = None, clock: Callable[[], datetime] = _utcnow):
        self._path = Path(path) if path is not None else None
        self._clock = clock
        self._lock = threading.Lock()
        self._entries: dict[int, PositivTweet] = {}
        self._next_id = 1
        if self._path is not None and self._path.exists():
            self._load()

    # --- lifecycle operations ------------------------------------------

    def import_seed(self, path: str | Path) -> int:
        """Import a seed file: one positivtweet per line, optional trailing
        tab plus comma-separated language tags. Every line becomes an
        APPROVED, CURATED entry. Exact duplicates are skipped, not fatal."""
        seed_path = Path(path)
        if not seed_path.exists():
            raise ParityError("MISSING_FIELD", f"seed file not found: {seed_path}")
        imported = 0
        with self._lock:
            existing_texts = {e.text for e in self._entries.values()}
            for lineno, line in enumerate(seed_path.read_text(encoding="utf-8").splitlines(), start=1):
                if not line.strip():
                    continue
                text, _, tag_part = line.partition("\t")
                text = text.strip()
                tags = tuple(t.strip() for t in tag_part.split(",") if t.strip()) if tag_part else ()
                unknown = [t for t in tags if t not in KNOWN_LANGUAGE_TAGS]
                if unknown:
                    raise ParityError("MISSING_FIELD", f"line {lineno}: unknown language tags {unknown}")
                if len(text) > MAX_TWEET_LEN:
                    raise ParityError("LINE_TOO_LONG", f"line {lineno}: {len(text)} chars exceeds {MAX_TWEET_LEN}")
                if text in existing_texts:
                    continue
                existing_texts.add(text)
                self._add(
                    PositivTweet(
                        id=self._take_id(),
                        text=text,
                        language_tags=tags,
                        origin=Origin.CURATED,
                        state=State.APPROVED,
                        submitted_at=self._clock(),
                        reviewed_at=self._clock(),
                    )
                )
                imported += 1
            self._save()
        return imported

    def submit(self, text: str, attribution: str | None = None) -> PositivTweet:
        trimmed = text.strip()
        if not trimmed:
            raise ParityError("EMPTY_TEXT", "submission is empty after trimming")
        if len(trimmed) > MAX_TWEET_LEN:
            raise ParityError("TEXT_TOO_LONG", f"{len(trimmed)} chars exceeds {MAX_TWEET_LEN}")
        with self._lock:
            entry = PositivTweet(
                id=self._take_id(),
                text=trimmed,
                language_tags=(),
                origin=Origin.CROWDSOURCED,
                state=State.PENDING,
                attribution=attribution,
                submitted_at=self._clock(),
            )
            self._add(entry)
            self._save()
        return entry

    def review(self, entry_id: int, verdict: Verdict, edited_text: str | None = None) -> PositivTweet:
        """Compare-and-set on the PENDING state; APPROVED/REJECTED are terminal."""
        with self._lock:
            entry = self._entries.get(entry_id)
            if entry is None:
                raise ParityError("UNKNOWN_ID", f"no positivtweet with id {entry_id}")
            if entry.state is not State.PENDING:
                raise ParityError("NOT_PENDING", f"id {entry_id} is already {entry.state.value}")
            if edited_text is not None:
                edited_text = edited_text.strip()
                if not edited_text:
                    raise ParityError("EMPTY_TEXT", "edited text is empty after trimming")
                if len(edited_text) > MAX_TWEET_LEN:
                    raise ParityError("EDIT_TOO_LONG", f"{len(edited_text)} chars exceeds {MAX_TWEET_LEN}")
            state = State.APPROVED if verdict is Verdict.APPROVE else State.REJECTED
            updated = replace(
                entry,
                state=state,
                reviewed_at=self._clock(),
                edited_text=edited_text if verdict is Verdict.APPROVE else entry.edited_text,
            )
            self._entries[entry_id] = updated
            self._save()
        return updated

    # --- reads ----------------------------------------------------------

    def get(self, entry_id: int) -> PositivTweet:
        entry = self._entries.get(entry_id)
        if entry is None:
            raise ParityError("UNKNOWN_ID", f"no positivtweet with id {entry_id}")
        return entry

    def approved(self) -> list[PositivTweet]:
        """The engine's sampling pool: exactly the APPROVED entries, id order."""
        return [e for _, e in sorted(self._entries.items()) if e.state is State.APPROVED]

    def by_state(self, state: State) -> list[PositivTweet]:
        return [e for _, e in sorted(self._entries.items()) if e.state is state]

    def all_entries(self) -> list[PositivTweet]:
        return [e for _, e in sorted(self._entries.items())]

    def counts(self) -> dict[str, int]:
        counts = {s.value: 0 for s in State}
        for e in self._entries.values():
            counts[e.state.value] += 1
        return counts

    # --- persistence ------------------------------------------------------

    def _take_id(self) -> int:
        entry_id = self._next_id
        self._next_id += 1
        return entry_id

    def _add(self, entry: PositivTweet) -> None:
        self._entries[entry.id] = entry

    def _save(self) -> None:
        if self._path is None:
            return
        self._path.parent.mkdir(parents=True, exist_ok=True)
        tmp = self._path.with_suffix(".tmp")
        with tmp.open("w", encoding="utf-8") as fh:
            for entry in self.all_entries():
                fh.write(json.dumps(_entry_to_json(entry), ensure_ascii=False) + "\n")
        os.replace(tmp, self._path)

    def _load(self) -> None:
        for line in self._path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            entry = _entry_from_json(json.loads(line))
            self._entries[entry.id] = entry
            self._next_id = max(self._next_id, entry.id + 1)


def _entry_to_json(entry: PositivTweet) -> dict:
    return {
        "id": entry.id,
        "text": entry.text,
        "language_tags": list(entry.language_tags),
        "origin": entry.origin.value,
        "state": entry.state.value,
        "attribution": entry.attribution,
        "submitted_at": format_rfc3339(entry.submitted_at) if entry.submitted_at else None,
        "reviewed_at": format_rfc3339(entry.reviewed_at) if entry.reviewed_at else None,
        "edited_text": entry.edited_text,
    }


def _entry_from_json(obj: dict) -> PositivTweet:
    return PositivTweet(
        id=int(obj["id"]),
        text=obj["text"],
        language_tags=tuple(obj.get("language_tags", [])),
        origin=Origin(obj["origin"]),
        state=State(obj["state"]),
        attribution=obj.get("attribution"),
        submitted_at=parse_rfc3339(obj["submitted_at"]) if obj.get("submitted_at") else None,
        reviewed_at=parse_rfc3339(obj["reviewed_at"]) if obj.get("reviewed_at") else None,
        edited_text=obj.get("edited_text"),
    )
