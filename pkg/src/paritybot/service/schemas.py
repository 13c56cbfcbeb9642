"""Request and response bodies for the HTTP service.

Field names mirror the domain types exactly; timestamps are RFC 3339
strings. The reports endpoint bypasses these models on purpose: its body is
the analytics payload serialized with the shared canonical dumper so the CLI
and the API stay byte-identical.
"""

from typing import Literal

from pydantic import BaseModel, ConfigDict

from ..common import format_rfc3339
from ..engine import Decision
from ..evaluation import Label
from ..library import PositivTweet
from ..store import StoredRecord


class HealthOut(BaseModel):
    status: str = "ok"


class ErrorBody(BaseModel):
    code: str
    message: str


class ErrorOut(BaseModel):
    error: ErrorBody


class FeedItem(BaseModel):
    tweet_id: str
    created_at: str
    author_handle: str
    text: str
    toxicity: float
    threshold_in_effect: float
    flagged: bool
    action: str
    candidate_handle: str
    positivtweet_id: int | None = None

    @classmethod
    def from_record(cls, record: StoredRecord) -> "FeedItem":
        decision: Decision = record.decision
        return cls(
            tweet_id=record.raw.id,
            created_at=format_rfc3339(record.raw.created_at),
            author_handle=record.raw.author_handle,
            text=record.clean.scoring_text,
            toxicity=record.scores.toxicity,
            threshold_in_effect=decision.threshold_in_effect,
            flagged=decision.flagged,
            action=decision.action.value,
            candidate_handle=decision.candidate_handle,
            positivtweet_id=decision.positivtweet_id,
        )


class FeedPage(BaseModel):
    items: list[FeedItem]
    next_cursor: str | None = None


class PositivTweetOut(BaseModel):
    model_config = ConfigDict(from_attributes=False)

    id: int
    text: str
    language_tags: list[str]
    origin: str
    state: str
    attribution: str | None = None
    submitted_at: str | None = None
    reviewed_at: str | None = None
    edited_text: str | None = None
    effective_text: str

    @classmethod
    def from_entry(cls, entry: PositivTweet) -> "PositivTweetOut":
        return cls(
            id=entry.id,
            text=entry.text,
            language_tags=list(entry.language_tags),
            origin=entry.origin.value,
            state=entry.state.value,
            attribution=entry.attribution,
            submitted_at=format_rfc3339(entry.submitted_at) if entry.submitted_at else None,
            reviewed_at=format_rfc3339(entry.reviewed_at) if entry.reviewed_at else None,
            edited_text=entry.edited_text,
            effective_text=entry.effective_text,
        )


class PositivTweetList(BaseModel):
    items: list[PositivTweetOut]


class SubmitRequest(BaseModel):
    text: str
    attribution: str | None = None


class ReviewRequest(BaseModel):
    verdict: Literal["APPROVE", "REJECT"]
    edited_text: str | None = None


class TaskOut(BaseModel):
    tweet_id: str
    text: str
    instructions: str
    labeled: int
    assigned: int


class LabelRequest(BaseModel):
    tweet_id: str
    annotator_id: str
    value: Literal["TOXIC", "NOT_TOXIC"]


class LabelOut(BaseModel):
    tweet_id: str
    annotator_id: str
    value: str
    labeled_at: str

    @classmethod
    def from_label(cls, label: Label) -> "LabelOut":
        return cls(
            tweet_id=label.tweet_id,
            annotator_id=label.annotator_id,
            value=label.value.value,
            labeled_at=format_rfc3339(label.labeled_at),
        )


class AgreementOut(BaseModel):
    sample_size: int
    labeled_items: int
    toxic_count: int
    not_toxic_count: int
    undecided_count: int
    toxic_pct: int | None
    not_toxic_pct: int | None
    kappa: float | None
    kappa_note: str | None
