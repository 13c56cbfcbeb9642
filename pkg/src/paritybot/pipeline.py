"""The run loop: listen, clean, score, decide, store.

Every timestamp a run emits is stream time (the tweet's created_at), never
the wall clock; with a fixed corpus, config, and seed two runs therefore
write byte-identical decision logs and manifests. Tweets mentioning no
tracked candidate are dropped before scoring. Tweets whose scoring fails
(empty after cleaning, or provider failure after retries) are stored with a
marker and excluded from toxic counts.
"""

import json
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from random import Random
from typing import Callable, Iterable, Sequence

from .common import dump_json, format_rfc3339
from .engine import Action, DecisionEngine, PosterAdapter, decision_to_json
from .errors import ParityError
from .ingest import CleanTweet, RawTweet, clean, first_tracked_mention, mentions_tracked
from .library import PositivLibrary
from .roster import Election
from .scorer import CachingProvider, ScoreProvider
from .store import Store, StoredRecord


@dataclass
class RunManifest:
    config_path: str
    source: str
    seed: int
    started_at: datetime | None
    counters: dict[str, int] = field(
        default_factory=lambda: {
            "analyzed": 0,
            "flagged": 0,
            "posted": 0,
            "suppressed": 0,
            "scoring_failed": 0,
        }
    )

    def check(self) -> None:
        c = self.counters
        if not c["posted"] <= c["flagged"] <= c["analyzed"]:
            raise ParityError(
                "CONSERVATION_VIOLATED",
                f"posted {c['posted']} <= flagged {c['flagged']} <= analyzed {c['analyzed']} failed",
            )


def manifest_to_json(manifest: RunManifest) -> dict:
    return {
        "config_path": manifest.config_path,
        "source": manifest.source,
        "seed": manifest.seed,
        "started_at": format_rfc3339(manifest.started_at) if manifest.started_at else None,
        "counters": dict(manifest.counters),
    }


@dataclass
class RunResult:
    manifest: RunManifest
    decisions_path: Path | None
    manifest_path: Path | None


def run_pipeline(
    source: Iterable[RawTweet],
    election: Election,
    roster_handles: Sequence[str],
    library: PositivLibrary,
    provider: ScoreProvider,
    store: Store,
    seed: int,
    config_path: str = "",
    source_label: str = "",
    poster: PosterAdapter | None = None,
    decisions_path: str | Path | None = None,
    manifest_path: str | Path | None = None,
    on_decision: Callable[[StoredRecord], None] | None = None,
) -> RunResult:
    """Drive one full run of the pipeline over a tweet source.

    The provider is wrapped in a per-run cache keyed on exact scoring text.
    The decision log gets one line per flagged-or-not decision (scoring
    failures appear only in the store). started_at is the first processed
    tweet's created_at, which keeps replays reproducible.
    """
    handles = frozenset(roster_handles)
    engine = DecisionEngine(election, library, Random(seed), poster)
    scorer = CachingProvider(provider)
    manifest = RunManifest(
        config_path=config_path, source=source_label, seed=seed, started_at=None
    )
    counters = manifest.counters

    decisions_file = None
    if decisions_path is not None:
        decisions_path = Path(decisions_path)
        decisions_path.parent.mkdir(parents=True, exist_ok=True)
        decisions_file = decisions_path.open("w", encoding="utf-8")

    try:
        for raw in source:
            tracked = mentions_tracked(raw, handles)
            if not tracked:
                continue
            if store.contains(raw.id):
                continue
            if manifest.started_at is None:
                manifest.started_at = raw.created_at

            cleaned = None
            scores = None
            decision = None
            try:
                cleaned = clean(raw)
                scores = scorer.score(cleaned.scoring_text)
            except ParityError as exc:
                if exc.code not in ("EMPTY_AFTER_CLEANING", "PROVIDER_UNAVAILABLE", "EMPTY_TEXT"):
                    raise
                counters["scoring_failed"] += 1
                scores = None

            if scores is not None:
                candidate = first_tracked_mention(raw, handles) or tracked[0]
                decision = engine.decide(raw, cleaned, scores, candidate)
                if decision.flagged:
                    counters["flagged"] += 1
                if decision.action is Action.POSTED:
                    counters["posted"] += 1
                elif decision.action is Action.SUPPRESSED_RATE_LIMIT:
                    counters["suppressed"] += 1
                if decisions_file is not None:
                    decisions_file.write(
                        json.dumps(decision_to_json(decision), ensure_ascii=False) + "\n"
                    )

            if cleaned is None:
                # Keep a queryable record of the dropped text: empty clean
                # forms beside the failure marker.
                cleaned = CleanTweet(tweet_id=raw.id, scoring_text="", matching_text="")
            record = StoredRecord(
                raw=raw, clean=cleaned, scores=scores, decision=decision, stored_at=raw.created_at
            )
            store.append(record)
            counters["analyzed"] += 1
            if on_decision is not None:
                on_decision(record)
    finally:
        if decisions_file is not None:
            decisions_file.close()

    manifest.check()
    written_manifest = None
    if manifest_path is not None:
        written_manifest = Path(manifest_path)
        written_manifest.parent.mkdir(parents=True, exist_ok=True)
        written_manifest.write_text(dump_json(manifest_to_json(manifest)), encoding="utf-8")
    return RunResult(
        manifest=manifest,
        decisions_path=decisions_path if decisions_path is not None else None,
        manifest_path=written_manifest,
    )
