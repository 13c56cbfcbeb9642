"""Curated registry of elections and the candidates tracked in each.

The roster is loaded once at startup and treated as immutable for the length
of a pipeline run. Gender is a curated input column and is never inferred
from a name anywhere in this package.
"""

import csv
import re
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from pathlib import Path

from .errors import ParityError

HANDLE_RE = re.compile(r"^[a-z0-9_]{1,15}$")

ROSTER_COLUMNS = ["display_name", "handle", "gender", "election_id", "verification_note"]


class Gender(Enum):
    WOMAN = "WOMAN"
    MAN = "MAN"
    NONBINARY = "NONBINARY"
    UNKNOWN = "UNKNOWN"


class ResponseMode(Enum):
    OWN_TIMELINE = "OWN_TIMELINE"
    REPLY_TO_CANDIDATE = "REPLY_TO_CANDIDATE"


def normalize_handle(raw: str) -> str:
    """Strip one leading '@', lowercase, and validate the platform handle shape."""
    if not raw or not raw.strip():
        raise ParityError("MALFORMED_HANDLE", "handle is empty")
    text = raw.strip()
    if text.startswith("@"):
        text = text[1:]
    text = text.lower()
    if not HANDLE_RE.match(text):
        raise ParityError("MALFORMED_HANDLE", f"handle {raw!r} is not a valid username")
    return text


@dataclass(frozen=True)
class Candidate:
    display_name: str
    handle: str
    gender: Gender
    election_id: str
    verification_note: str = ""


@dataclass(frozen=True)
class ThresholdPhase:
    effective_from: datetime
    live_threshold: float


@dataclass(frozen=True)
class RateCaps:
    per_day: int
    window_seconds: int
    window_cap: int

    def __post_init__(self):
        if self.per_day <= 0 or self.window_seconds <= 0 or self.window_cap <= 0:
            raise ParityError("INVALID_RATE_CAPS", "rate caps must be positive")


@dataclass(frozen=True)
class Election:
    id: str
    name: str
    country: str
    start_at: datetime
    end_at: datetime
    threshold_schedule: tuple[ThresholdPhase, ...]
    analysis_threshold_default: float
    response_mode: ResponseMode
    rate_caps: RateCaps

    def __post_init__(self):
        if not self.threshold_schedule:
            raise ParityError("INVALID_SCHEDULE", "threshold schedule is empty")
        times = [p.effective_from for p in self.threshold_schedule]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ParityError("INVALID_SCHEDULE", "schedule must be strictly increasing in effective_from")
        for phase in self.threshold_schedule:
            if not 0.0 < phase.live_threshold < 1.0:
                raise ParityError("INVALID_SCHEDULE", f"threshold {phase.live_threshold} outside (0,1)")
        if not 0.0 < self.analysis_threshold_default < 1.0:
            raise ParityError("INVALID_SCHEDULE", "analysis threshold outside (0,1)")
        if self.start_at >= self.end_at:
            raise ParityError("INVALID_ELECTION", "start_at must precede end_at")

    @property
    def days_in_operation(self) -> int:
        return (self.end_at.date() - self.start_at.date()).days


@dataclass
class Roster:
    """Candidates of one election, indexed by normalized handle."""

    election_id: str
    candidates: list[Candidate] = field(default_factory=list)

    @property
    def handles(self) -> frozenset[str]:
        return frozenset(c.handle for c in self.candidates)

    def __len__(self) -> int:
        return len(self.candidates)


def load_roster(path: str | Path, election_id: str) -> list[Candidate]:
    """Read the roster CSV and return the candidates of one election.

    Rows with a different election_id are ignored (the same file may hold
    several deployments); duplicate handles within the requested election
    are an error.
    """
    path = Path(path)
    if not path.exists():
        raise ParityError("MISSING_FIELD", f"roster file not found: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in ROSTER_COLUMNS if c not in header]
        if missing:
            raise ParityError("MISSING_FIELD", f"roster header missing columns: {', '.join(missing)}")
        candidates: list[Candidate] = []
        seen: dict[str, int] = {}
        for lineno, row in enumerate(reader, start=2):
            if row.get("election_id", "") != election_id:
                continue
            display_name = (row.get("display_name") or "").strip()
            raw_handle = (row.get("handle") or "").strip()
            if not display_name:
                raise ParityError("MISSING_FIELD", f"line {lineno}: display_name is empty")
            if not raw_handle:
                raise ParityError("MISSING_FIELD", f"line {lineno}: handle is empty")
            handle = normalize_handle(raw_handle)
            if handle in seen:
                raise ParityError(
                    "DUPLICATE_HANDLE",
                    f"line {lineno}: handle {handle!r} already defined at line {seen[handle]}",
                )
            seen[handle] = lineno
            gender_raw = (row.get("gender") or "").strip().lower()
            if not gender_raw:
                gender = Gender.UNKNOWN
            else:
                try:
                    gender = Gender(gender_raw.upper())
                except ValueError:
                    raise ParityError("MISSING_FIELD", f"line {lineno}: unknown gender {gender_raw!r}")
            candidates.append(
                Candidate(
                    display_name=display_name,
                    handle=handle,
                    gender=gender,
                    election_id=election_id,
                    verification_note=(row.get("verification_note") or "").strip(),
                )
            )
    return candidates


def save_roster(candidates: list[Candidate], path: str | Path) -> None:
    """Serialize candidates back to the roster CSV format (round-trip stable)."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=ROSTER_COLUMNS)
        writer.writeheader()
        for c in candidates:
            writer.writerow(
                {
                    "display_name": c.display_name,
                    "handle": c.handle,
                    "gender": c.gender.value.lower(),
                    "election_id": c.election_id,
                    "verification_note": c.verification_note,
                }
            )
