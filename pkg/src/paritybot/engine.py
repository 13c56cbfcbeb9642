"""The decision core: threshold check, rate limiting, positivtweet sampling.

A tweet is flagged iff TOXICITY is strictly greater than the threshold in
effect at its creation time. Flagged tweets post a sampled positivtweet when
the limiter grants a token; otherwise the response is suppressed and
recorded. All clocks here are stream time (the tweet's created_at), which is
what makes replays byte-identical.
"""

import threading
from collections import deque
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from random import Random
from typing import Protocol, Sequence

from .common import format_rfc3339
from .errors import ParityError
from .ingest import CleanTweet, RawTweet
from .library import PositivTweet
from .roster import Election, RateCaps, ResponseMode, ThresholdPhase
from .scorer import AttributeScores

# Approved entries posted within the last K decisions are not re-sampled,
# unless nothing else is left.
NO_REPEAT_WINDOW = 25


class Action(Enum):
    NONE = "NONE"
    POSTED = "POSTED"
    SUPPRESSED_RATE_LIMIT = "SUPPRESSED_RATE_LIMIT"


SUPPRESS_RATE_LIMIT = "RATE_LIMIT"
SUPPRESS_EMPTY_LIBRARY = "EMPTY_LIBRARY"


@dataclass(frozen=True)
class Decision:
    tweet_id: str
    candidate_handle: str
    toxicity: float
    threshold_in_effect: float
    flagged: bool
    action: Action
    positivtweet_id: int | None
    decided_at: datetime
    suppress_reason: str | None = None


def threshold_at(schedule: Sequence[ThresholdPhase], t: datetime) -> float:
    """Live threshold at time t: the latest phase whose effective_from <= t,
    or the first phase for times before the schedule starts."""
    if not schedule:
        raise ParityError("INVALID_SCHEDULE", "threshold schedule is empty")
    current = schedule[0].live_threshold
    for phase in schedule:
        if phase.effective_from <= t:
            current = phase.live_threshold
        else:
            break
    return current


class RateLimiter:
    """Calendar-day cap plus a sliding short-window cap, driven by event time.

    Occupancy counts posts with timestamp in (t - window_seconds, t], so any
    half-open window of the configured length holds at most window_cap posts.
    Event times are clamped to be non-decreasing.
    """

    def __init__(self, caps: RateCaps):
        self.caps = caps
        self._day_key = None
        self._day_count = 0
        self._window: deque[datetime] = deque()
        self._last_at: datetime | None = None

    def _advance(self, at: datetime) -> datetime:
        if self._last_at is not None and at < self._last_at:
            at = self._last_at
        self._last_at = at
        day = at.astimezone(timezone.utc).date()
        if day != self._day_key:
            self._day_key = day
            self._day_count = 0
        while self._window and (at - self._window[0]).total_seconds() >= self.caps.window_seconds:
            self._window.popleft()
        return at

    def would_grant(self, at: datetime) -> bool:
        self._advance(at)
        return self._day_count < self.caps.per_day and len(self._window) < self.caps.window_cap

    def consume(self, at: datetime) -> None:
        at = self._advance(at)
        if self._day_count >= self.caps.per_day or len(self._window) >= self.caps.window_cap:
            raise ParityError("RATE_LIMIT", "consume called without an available token")
        self._day_count += 1
        self._window.append(at)


def sample_positivtweet(
    pool: Sequence[PositivTweet], rng: Random, recent: Sequence[int] = ()
) -> PositivTweet:
    """Uniform over the approved pool minus recently posted ids; if that
    leaves nothing, uniform over the full pool."""
    if not pool:
        raise ParityError("EMPTY_LIBRARY", "no approved positivtweets to sample")
    recent_ids = set(recent)
    eligible = [p for p in pool if p.id not in recent_ids]
    return rng.choice(eligible or list(pool))


class PosterAdapter(Protocol):
    def post(self, text: str, reply_to_handle: str | None = None) -> str: ...


class DryRunPoster:
    """Bundled poster: records what would have been sent, returns synthetic ids."""

    def __init__(self):
        self.posts: list[dict] = []

    def post(self, text: str, reply_to_handle: str | None = None) -> str:
        post_id = f"dry-{len(self.posts) + 1}"
        self.posts.append({"id": post_id, "text": text, "reply_to_handle": reply_to_handle})
        return post_id


class DecisionEngine:
    """Serialized decision maker for one election deployment.

    Exactly one decision is in flight at a time: the limiter and the
    no-repeat ring are stateful. Scoring may be concurrent upstream.
    """

    def __init__(self, election: Election, library, rng: Random, poster: PosterAdapter | None = None):
        self.election = election
        self.library = library
        self.rng = rng
        self.poster = poster or DryRunPoster()
        self.limiter = RateLimiter(election.rate_caps)
        self._recent: deque[int] = deque(maxlen=NO_REPEAT_WINDOW)
        self._lock = threading.Lock()

    def decide(
        self,
        raw: RawTweet,
        clean: CleanTweet,
        scores: AttributeScores,
        candidate_handle: str,
    ) -> Decision:
        with self._lock:
            toxicity = scores.toxicity
            threshold = threshold_at(self.election.threshold_schedule, raw.created_at)
            flagged = toxicity > threshold
            action = Action.NONE
            positivtweet_id = None
            suppress_reason = None
            if flagged:
                if not self.limiter.would_grant(raw.created_at):
                    action = Action.SUPPRESSED_RATE_LIMIT
                    suppress_reason = SUPPRESS_RATE_LIMIT
                else:
                    pool = self.library.approved()
                    if not pool:
                        # Token granted but nothing to post; the token is not spent.
                        action = Action.SUPPRESSED_RATE_LIMIT
                        suppress_reason = SUPPRESS_EMPTY_LIBRARY
                    else:
                        chosen = sample_positivtweet(pool, self.rng, self._recent)
                        self.limiter.consume(raw.created_at)
                        self._recent.append(chosen.id)
                        reply_to = (
                            candidate_handle
                            if self.election.response_mode is ResponseMode.REPLY_TO_CANDIDATE
                            else None
                        )
                        self.poster.post(chosen.effective_text, reply_to)
                        action = Action.POSTED
                        positivtweet_id = chosen.id
            return Decision(
                tweet_id=raw.id,
                candidate_handle=candidate_handle,
                toxicity=toxicity,
                threshold_in_effect=threshold,
                flagged=flagged,
                action=action,
                positivtweet_id=positivtweet_id,
                decided_at=raw.created_at,
                suppress_reason=suppress_reason,
            )


def decision_to_json(decision: Decision) -> dict:
    return {
        "tweet_id": decision.tweet_id,
        "candidate_handle": decision.candidate_handle,
        "toxicity": decision.toxicity,
        "threshold_in_effect": decision.threshold_in_effect,
        "flagged": decision.flagged,
        "action": decision.action.value,
        "positivtweet_id": decision.positivtweet_id,
        "decided_at": format_rfc3339(decision.decided_at),
        "suppress_reason": decision.suppress_reason,
    }


def decision_from_json(obj: dict) -> Decision:
    from .common import parse_rfc3339

    return Decision(
        tweet_id=obj["tweet_id"],
        candidate_handle=obj["candidate_handle"],
        toxicity=obj["toxicity"],
        threshold_in_effect=obj["threshold_in_effect"],
        flagged=obj["flagged"],
        action=Action(obj["action"]),
        positivtweet_id=obj.get("positivtweet_id"),
        decided_at=parse_rfc3339(obj["decided_at"]),
        suppress_reason=obj.get("suppress_reason"),
    )
