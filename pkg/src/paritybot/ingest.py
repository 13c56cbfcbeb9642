"""Tweet sources and text cleaning.

A source yields RawTweet values in non-decreasing created_at order. Three
kinds exist: replay over a JSON Lines corpus, a fully seeded synthetic
generator, and a declared-but-unbundled live adapter. Cleaning produces the
scorer-facing text (emoji and control characters stripped, whitespace
collapsed) and its lowercase twin for lexicon matching; hashtags, URLs and
user mentions are kept because human reviewers see them too.
"""

import json
import re
import unicodedata
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path
from random import Random
from typing import Iterable, Iterator, Protocol

from .common import format_rfc3339, parse_rfc3339
from .errors import ParityError

MAX_TWEET_CHARS = 4000

# Pictographic/emoji codepoints: symbol blocks, dingbats, regional indicators,
# skin-tone modifiers, ZWJ sequences, variation selectors, keycap combiner.
_EMOJI_RE = re.compile(
    "["
    "‍"
    "⃣"
    "☀-➿"
    "⬅-⬇"
    "⬛⬜⭐⭕"
    "︎️"
    "\U0001f000-\U0001faff"
    "]+"
)

_WS_RE = re.compile(r"\s+")

# Whitespace-class control characters are left for the collapse step so that
# newlines still separate words instead of gluing them together.
_WS_CONTROLS = "\t\n\r\x0b\x0c"


@dataclass(frozen=True)
class RawTweet:
    id: str
    created_at: datetime
    author_handle: str
    text: str
    mentioned_handles: tuple[str, ...] = ()
    in_reply_to: str | None = None


@dataclass(frozen=True)
class CleanTweet:
    tweet_id: str
    scoring_text: str
    matching_text: str


def clean(tweet: RawTweet) -> CleanTweet:
    """Produce the scoring and matching forms of a tweet's text.

    Steps: NFC normalize, strip emoji, strip non-whitespace control and
    format characters, collapse runs of whitespace, trim. A final NFC pass
    keeps the function idempotent when a removal exposes a combining mark.
    """
    text = unicodedata.normalize("NFC", tweet.text)
    text = _EMOJI_RE.sub("", text)
    text = "".join(
        ch for ch in text if unicodedata.category(ch) not in ("Cc", "Cf") or ch in _WS_CONTROLS
    )
    text = _WS_RE.sub(" ", text).strip()
    text = unicodedata.normalize("NFC", text)
    if not text:
        raise ParityError("EMPTY_AFTER_CLEANING", f"tweet {tweet.id}: nothing left after cleaning")
    return CleanTweet(tweet_id=tweet.id, scoring_text=text, matching_text=text.lower())


def mentions_tracked(tweet: RawTweet, roster_handles: Iterable[str]) -> list[str]:
    """Sorted intersection of the tweet's mentions with the tracked handles.

    An empty result means the tweet is dropped before scoring.
    """
    tracked = set(roster_handles)
    return sorted(set(tweet.mentioned_handles) & tracked)


def first_tracked_mention(tweet: RawTweet, roster_handles: Iterable[str]) -> str | None:
    """First tracked mention in text order; the posting decision is attributed
    to this candidate while analytics counts every tracked mention."""
    tracked = set(roster_handles)
    for handle in tweet.mentioned_handles:
        if handle in tracked:
            return handle
    return None


def _lenient_handle(raw: str) -> str:
    text = raw.strip()
    if text.startswith("@"):
        text = text[1:]
    return text.lower()


# --- sources ---------------------------------------------------------------


@dataclass(frozen=True)
class ReplaySpec:
    path: Path


@dataclass(frozen=True)
class SyntheticSpec:
    seed: int
    volume: int
    toxic_fraction: float = 0.0
    mention_handles: tuple[str, ...] = ("candidate_one",)
    start_at: datetime = datetime(2020, 10, 1, tzinfo=timezone.utc)
    toxic_marker: str = "utterly dreadful"


@dataclass(frozen=True)
class LiveSpec:
    endpoint: str


SourceSpec = ReplaySpec | SyntheticSpec | LiveSpec


class TweetSource(Protocol):
    def __iter__(self) -> Iterator[RawTweet]: ...


def parse_corpus_line(line: str, lineno: int) -> RawTweet:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParityError("CORPUS_PARSE_ERROR", f"line {lineno}: invalid JSON ({exc.msg})") from exc
    if not isinstance(obj, dict):
        raise ParityError("CORPUS_PARSE_ERROR", f"line {lineno}: expected a JSON object")
    try:
        tweet_id = obj["id"]
        created_at = parse_rfc3339(obj["created_at"])
        author = _lenient_handle(obj["author_handle"])
        text = obj["text"]
        mentions = obj.get("mentioned_handles", [])
    except (KeyError, TypeError, ParityError) as exc:
        raise ParityError("CORPUS_PARSE_ERROR", f"line {lineno}: {exc}") from exc
    if not isinstance(tweet_id, str) or not tweet_id:
        raise ParityError("CORPUS_PARSE_ERROR", f"line {lineno}: id must be a non-empty string")
    if not isinstance(text, str) or not unicodedata.normalize("NFC", text).strip():
        raise ParityError("CORPUS_PARSE_ERROR", f"line {lineno}: text is empty")
    if len(text) > MAX_TWEET_CHARS:
        raise ParityError("CORPUS_PARSE_ERROR", f"line {lineno}: text exceeds {MAX_TWEET_CHARS} chars")
    if not isinstance(mentions, list) or not all(isinstance(m, str) for m in mentions):
        raise ParityError("CORPUS_PARSE_ERROR", f"line {lineno}: mentioned_handles must be strings")
    reply_to = obj.get("in_reply_to")
    if reply_to is not None and not isinstance(reply_to, str):
        raise ParityError("CORPUS_PARSE_ERROR", f"line {lineno}: in_reply_to must be a string")
    return RawTweet(
        id=tweet_id,
        created_at=created_at,
        author_handle=author,
        text=text,
        mentioned_handles=tuple(_lenient_handle(m) for m in mentions),
        in_reply_to=reply_to,
    )


def replay_source(path: str | Path) -> Iterator[RawTweet]:
    """Yield exactly the corpus, in file order. Duplicate ids within one
    corpus are a parse error; blank lines are skipped."""
    path = Path(path)
    if not path.exists():
        raise ParityError("CORPUS_NOT_FOUND", f"corpus file not found: {path}")
    seen: set[str] = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            tweet = parse_corpus_line(line, lineno)
            if tweet.id in seen:
                raise ParityError("CORPUS_PARSE_ERROR", f"line {lineno}: duplicate tweet id {tweet.id!r}")
            seen.add(tweet.id)
            yield tweet


_BENIGN_PHRASES = [
    "great town hall tonight, thanks for answering my question",
    "looking forward to the debate coverage",
    "what is your plan for transit in the north end",
    "thank you for standing up for our riding",
    "saw the new policy platform today, lots to read",
    "good luck in the final stretch of the campaign",
    "appreciated the clear answer on housing",
    "the volunteers at your office were so helpful",
]

_TOXIC_PHRASES = [
    "this announcement is {marker} and so are you",
    "another {marker} stunt from a {marker} campaign",
    "you should be ashamed, {marker} from start to finish",
    "what a {marker} excuse for leadership",
]


def synthetic_source(spec: SyntheticSpec) -> Iterator[RawTweet]:
    """Deterministic generator: the full stream is a function of the spec.

    round(volume * toxic_fraction) tweets carry the toxic marker phrase, at
    seeded positions; pair with a lexicon scorer that weights the marker to
    control the flagged fraction exactly.
    """
    if spec.volume < 0:
        raise ParityError("CORPUS_PARSE_ERROR", "synthetic volume must be >= 0")
    if not 0.0 <= spec.toxic_fraction <= 1.0:
        raise ParityError("CORPUS_PARSE_ERROR", "toxic_fraction must be within [0,1]")
    rng = Random(spec.seed)
    toxic_count = round(spec.volume * spec.toxic_fraction)
    toxic_positions = set(rng.sample(range(spec.volume), toxic_count)) if spec.volume else set()
    at = spec.start_at
    for i in range(spec.volume):
        handle = rng.choice(spec.mention_handles)
        if i in toxic_positions:
            body = rng.choice(_TOXIC_PHRASES).format(marker=spec.toxic_marker)
        else:
            body = rng.choice(_BENIGN_PHRASES)
        yield RawTweet(
            id=f"syn-{spec.seed}-{i:06d}",
            created_at=at,
            author_handle=f"user{rng.randrange(1_000_000)}",
            text=f"@{handle} {body}",
            mentioned_handles=(handle,),
        )
        at = at + timedelta(seconds=rng.randint(5, 25))


def open_source(spec: SourceSpec, live_adapter: TweetSource | None = None) -> Iterator[RawTweet]:
    """Open a tweet stream for a source spec.

    A live spec requires a caller-provided adapter; none ships with the
    package.
    """
    if isinstance(spec, ReplaySpec):
        return replay_source(spec.path)
    if isinstance(spec, SyntheticSpec):
        return synthetic_source(spec)
    if isinstance(spec, LiveSpec):
        if live_adapter is None:
            raise ParityError("LIVE_UNCONFIGURED", "no live adapter is configured for this deployment")
        return iter(live_adapter)
    raise ParityError("CORPUS_PARSE_ERROR", f"unknown source spec: {spec!r}")


def tweet_to_json(tweet: RawTweet) -> dict:
    payload = {
        "id": tweet.id,
        "created_at": format_rfc3339(tweet.created_at),
        "author_handle": tweet.author_handle,
        "text": tweet.text,
        "mentioned_handles": list(tweet.mentioned_handles),
    }
    if tweet.in_reply_to is not None:
        payload["in_reply_to"] = tweet.in_reply_to
    return payload


def write_corpus(tweets: Iterable[RawTweet], path: str | Path) -> int:
    """Serialize tweets to the JSON Lines corpus format; returns the count."""
    count = 0
    with Path(path).open("w", encoding="utf-8") as fh:
        for tweet in tweets:
            fh.write(json.dumps(tweet_to_json(tweet), ensure_ascii=False) + "\n")
            count += 1
    return count
