"""Shared fixtures: reference elections, tweet corpora with known scores, and
a deterministic scorer that reproduces those scores offline."""

import json
from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

from paritybot.engine import Action, Decision
from paritybot.ingest import RawTweet, clean
from paritybot.library import PositivLibrary
from paritybot.roster import Candidate, Election, Gender, RateCaps, ResponseMode, ThresholdPhase
from paritybot.scorer import AttributeScores, LexiconProvider, LexiconScorerConfig
from paritybot.store import Store, StoredRecord

UTC = timezone.utc


def ts(day: int, hour: int = 12, minute: int = 0, second: int = 0, month: int = 10, year: int = 2019):
    return datetime(year, month, day, hour, minute, second, tzinfo=UTC)


def make_election(
    election_id: str = "ca2019",
    start: datetime | None = None,
    end: datetime | None = None,
    schedule: list[tuple[datetime, float]] | None = None,
    analysis_threshold: float = 0.9,
    response_mode: ResponseMode = ResponseMode.OWN_TIMELINE,
    per_day: int = 100,
    window_seconds: int = 900,
    window_cap: int = 15,
) -> Election:
    start = start or datetime(2019, 9, 18, tzinfo=UTC)
    end = end or datetime(2019, 10, 21, tzinfo=UTC)
    schedule = schedule or [(start, 0.9)]
    return Election(
        id=election_id,
        name=election_id,
        country="CA",
        start_at=start,
        end_at=end,
        threshold_schedule=tuple(ThresholdPhase(t, v) for t, v in schedule),
        analysis_threshold_default=analysis_threshold,
        response_mode=response_mode,
        rate_caps=RateCaps(per_day=per_day, window_seconds=window_seconds, window_cap=window_cap),
    )


def make_candidate(handle: str, election_id: str = "ca2019", gender: Gender = Gender.WOMAN) -> Candidate:
    return Candidate(
        display_name=handle.title(),
        handle=handle,
        gender=gender,
        election_id=election_id,
        verification_note="fixture",
    )


def make_tweet(
    tweet_id: str,
    text: str,
    mentions: tuple[str, ...],
    at: datetime | None = None,
    author: str = "someuser",
) -> RawTweet:
    return RawTweet(
        id=tweet_id,
        created_at=at or ts(1),
        author_handle=author,
        text=text,
        mentioned_handles=mentions,
    )


def make_record(
    tweet_id: str,
    text: str,
    toxicity: float | None,
    handle: str = "cathmckenna",
    at: datetime | None = None,
    action: Action = Action.NONE,
    threshold: float = 0.9,
    mentions: tuple[str, ...] | None = None,
) -> StoredRecord:
    """A stored record with an explicit toxicity; None marks scoring failure."""
    raw = make_tweet(tweet_id, text, mentions or (handle,), at=at)
    cleaned = clean(raw)
    if toxicity is None:
        return StoredRecord(raw=raw, clean=cleaned, scores=None, decision=None, stored_at=raw.created_at)
    decision = Decision(
        tweet_id=tweet_id,
        candidate_handle=handle,
        toxicity=toxicity,
        threshold_in_effect=threshold,
        flagged=toxicity > threshold,
        action=action,
        positivtweet_id=1 if action is Action.POSTED else None,
        decided_at=raw.created_at,
        suppress_reason="RATE_LIMIT" if action is Action.SUPPRESSED_RATE_LIMIT else None,
    )
    scores = AttributeScores(scores={"TOXICITY": toxicity}, provider_id="lexicon", model_version="1")
    return StoredRecord(raw=raw, clean=cleaned, scores=scores, decision=decision, stored_at=raw.created_at)


def seed_corpus_store(store: Store, texts_with_scores, handle: str, prefix: str) -> Store:
    """Append one record per (text, printed score), second-spaced timestamps."""
    for i, (text, score) in enumerate(texts_with_scores, start=1):
        store.append(make_record(f"{prefix}-{i:03d}", text, score, handle=handle, at=ts(1, 12, 0, i)))
    return store


# Six tweets aimed at one candidate, with the toxicity each should score.
# The scorer terms below are unique per tweet so the offline provider
# reproduces these exact numbers.
MCKENNA_TWEETS: list[tuple[str, float]] = [
    (
        "Well Climate Barbie that is another big promise you have zero chance of seeing "
        "through as you are done October 21. Don't worry many of us will give a fine send off!",
        0.192,
    ),
    (
        "Hey. Climate Barbie. I thought we were fucked in 12 years? Is this something you're "
        "going to say loud. Say often. And say in parliament, hoping that everyone will "
        "believe you? Is it Climate Barbie?",
        0.714,
    ),
    (
        "To think you've been in your position for 4 years and have accomplished nothing says "
        "alot Climate Barbie. But than again you're just dumb plain and simple. . .",
        0.782,
    ),
    (
        "Where's @cathmckenna aka Climate Barbie aka Poo Barbie aka Sewage Hag aka Sewage "
        "Barbie been hiding? Would have thought she'd been with Greta and Trudeau for the Photo Op.",
        0.322,
    ),
    (
        "Let's hope we can do this let climate barbie get into her barbie car and drive off "
        "into her barbie world never to be see again.",
        0.381,
    ),
    (
        "To think that in 15 months, a mentally challenged girl could lie to everyone around "
        "the world with that scowl demanding everyone take action except herself. Never "
        "underestimate the power of one girl to lie. Actually 2. Climate Barbie Fixed it. "
        "Thank me later",
        0.246,
    ),
]

MCKENNA_SCORER_ENTRIES = {
    "zero chance of seeing through": 0.192,
    "i thought we were fucked": 0.714,
    "dumb plain and simple": 0.782,
    "sewage hag": 0.322,
    "barbie car": 0.381,
    "mentally challenged": 0.246,
}

ARDERN_TWEETS: list[tuple[str, float]] = [
    ("cindy is in bed with the ccp no doubt about it", 0.274),
    ("coz auntie cindy paid them off too they know where their breads buttered fakenews", 0.175),
    (
        "years ago i went to madam tussauds now that is freaky to have a valid dinner convo on "
        "the cindy hot or not topic the best way would be a life sized cindyquin at the table "
        "may put most off their meal though except commander dc",
        0.185,
    ),
    ("hey super star cindy is the communist sympathetic socialist", 0.203),
    ("cindy stfu please", 0.568),
    ("data doesnt lie but cindy does", 0.281),
]

HARRIS_TWEETS: list[tuple[str, float]] = [
    (
        "naw heifer i wont send you any money a good democrat would steal it commala harris "
        "extreme liberal imagine if biden is unable to serve this spiteful woman could use our "
        "constitution to employ the 25th amendment to elevate herself to become president vicious",
        0.515,
    ),
    (
        "Comma-la is a joke. Even more unlikeable than Shriillary. There's a reason they kept "
        'her off the campaign trail!"',
        0.690,
    ),
    ("Your an absolute joke comma-la heels up Harris!", 0.650),
    (
        "Say, that reminds me, did you-all meet Kamala? Huh? What? Camel-uh or Comma-la? Huh? "
        "That reminds me, what's that Tony Soprano's wife's name? Yeah? I like caramel corn. "
        "Say, that reminds me, I like kids jumping up on my lap.",
        0.325,
    ),
    (
        "The perky donkey is a problem for everyone, her party is petrified of her. Biden will "
        "fall on his arthritic knees to every radical .AOC demand. Joe's too weak to resist. "
        "Comma-la will jump to enact any ideological policy the squad wants. "
        "<https://t.co/rcDbIPAk9s>",
        0.473,
    ),
    ("Would you prefer Commala or Commyla? Asking for a friend.", 0.057),
    ("So it's [camel]-A? Clamata is like the olive. Comma-la? Maybe just #heelsupharris", 0.068),
]


def corpus_tweets(
    texts_with_scores: list[tuple[str, float]], handle: str, prefix: str
) -> list[RawTweet]:
    return [
        make_tweet(f"{prefix}-{i:03d}", text, (handle,), at=ts(1, 12, i))
        for i, (text, _) in enumerate(texts_with_scores, start=1)
    ]


def write_corpus_file(tweets: list[RawTweet], path: Path) -> Path:
    from paritybot.ingest import tweet_to_json

    with path.open("w", encoding="utf-8") as fh:
        for t in tweets:
            fh.write(json.dumps(tweet_to_json(t), ensure_ascii=False) + "\n")
    return path


@pytest.fixture
def mckenna_provider() -> LexiconProvider:
    return LexiconProvider(LexiconScorerConfig(entries=MCKENNA_SCORER_ENTRIES))


@pytest.fixture
def empty_store(tmp_path) -> Store:
    return Store(tmp_path / "store")


@pytest.fixture
def approved_library(tmp_path) -> PositivLibrary:
    library = PositivLibrary(tmp_path / "library.jsonl")
    for i in range(5):
        entry = library.submit(f"You are doing great, keep going! ({i})")
        from paritybot.library import Verdict

        library.review(entry.id, Verdict.APPROVE)
    return library


def burst_tweets(
    count: int,
    toxic_every: int,
    handle: str = "cathmckenna",
    start: datetime | None = None,
    gap_seconds: int = 30,
    toxic_text: str = "you are a disgrace and a fraud",
    benign_text: str = "thank you for the town hall",
) -> list[RawTweet]:
    """count tweets, every toxic_every-th one carrying the toxic text."""
    start = start or ts(1, 0)
    tweets = []
    for i in range(count):
        toxic = toxic_every > 0 and i % toxic_every == 0
        tweets.append(
            make_tweet(
                f"burst-{i:06d}",
                f"@{handle} {toxic_text if toxic else benign_text}",
                (handle,),
                at=start + timedelta(seconds=i * gap_seconds),
            )
        )
    return tweets
