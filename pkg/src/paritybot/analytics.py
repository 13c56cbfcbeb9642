"""Report generation over the store: election summaries, per-candidate
toxicity shares, and microaggression-lexicon false-negative accounting.

Everything here is a pure read-side computation over a store snapshot, so
reports can run beside a live ingest. Counts are per candidate mention: a
tweet mentioning several tracked candidates counts once for each of them,
and the share denominator is the sum of those per-candidate toxic counts.
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .common import integer_percent
from .engine import Action
from .errors import ParityError
from .roster import Candidate, Election, normalize_handle
from .store import QueryFilter, Store


@dataclass(frozen=True)
class LexiconEntry:
    """One tracked microaggression term with its spelling variants.

    Variants are plain lowercase substrings; hyphenated forms are extra
    variants, not fuzzy matches.
    """

    target_handle: str
    canonical_term: str
    variants: tuple[str, ...]

    def __post_init__(self):
        if not self.variants:
            raise ParityError("LEXICON_INVALID", f"{self.canonical_term!r}: no variants")
        for v in self.variants:
            if not v or v != v.lower():
                raise ParityError("LEXICON_INVALID", f"variant must be lowercase and non-empty: {v!r}")
        if self.canonical_term not in self.variants:
            raise ParityError(
                "LEXICON_INVALID",
                f"canonical term {self.canonical_term!r} missing from its own variants",
            )


def load_lexicon(path: str | Path) -> list[LexiconEntry]:
    """Lexicon config: a JSON array of {target_handle, canonical_term, variants}."""
    path = Path(path)
    if not path.exists():
        raise ParityError("LEXICON_INVALID", f"lexicon file not found: {path}")
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParityError("LEXICON_INVALID", f"{path}: invalid JSON ({exc.msg})") from exc
    if not isinstance(payload, list):
        raise ParityError("LEXICON_INVALID", f"{path}: expected a JSON array")
    entries = []
    for i, obj in enumerate(payload):
        try:
            entries.append(
                LexiconEntry(
                    target_handle=normalize_handle(obj["target_handle"]),
                    canonical_term=obj["canonical_term"],
                    variants=tuple(obj["variants"]),
                )
            )
        except (KeyError, TypeError) as exc:
            raise ParityError("LEXICON_INVALID", f"{path}: entry {i}: {exc}") from exc
    return entries


@dataclass(frozen=True)
class LexiconCounts:
    matches: int
    toxic_matches: int


@dataclass(frozen=True)
class CandidateReport:
    handle: str
    total_tweets: int
    toxic_tweets: int
    share_of_total_toxic: int
    lexicon_rows: tuple[dict, ...] = ()


@dataclass(frozen=True)
class ElectionReport:
    election_id: str
    days_in_operation: int
    report_threshold: float
    candidates_tracked: int
    tweets_analyzed: int
    tweets_flagged: int
    positives_sent: int


def candidate_share(toxic_to_candidate: int, total_toxic: int) -> int:
    """Integer percent of all toxic mentions directed at one candidate,
    rounding halves away from zero."""
    if total_toxic <= 0:
        raise ParityError("UNDEFINED_SHARE", "no toxic tweets to take a share of")
    if toxic_to_candidate > total_toxic:
        raise ParityError(
            "UNDEFINED_SHARE", f"candidate count {toxic_to_candidate} exceeds total {total_toxic}"
        )
    return integer_percent(toxic_to_candidate, total_toxic)


def false_negatives(matches: int, toxic_matches: int) -> int:
    """Lexicon matches the scorer did not rate above threshold."""
    if toxic_matches > matches:
        raise ParityError("NEGATIVE_RESULT", f"toxic matches {toxic_matches} exceed matches {matches}")
    return matches - toxic_matches


def count_lexicon_matches(store: Store, entry: LexiconEntry, threshold: float) -> LexiconCounts:
    """Matches = records addressed to the entry's target whose matching_text
    contains any variant; toxic matches additionally have TOXICITY strictly
    above the threshold. Records without scores never count as toxic."""
    matches = 0
    toxic = 0
    for record in store.query(QueryFilter(candidate_handle=entry.target_handle)):
        if not any(v in record.clean.matching_text for v in entry.variants):
            continue
        matches += 1
        if record.scores is not None and record.scores.toxicity > threshold:
            toxic += 1
    return LexiconCounts(matches=matches, toxic_matches=toxic)


def election_report(
    store: Store,
    election: Election,
    threshold: float,
    candidates: Sequence[Candidate] = (),
) -> ElectionReport:
    if not 0.0 < threshold < 1.0:
        raise ParityError("UNDEFINED_SHARE", f"report threshold {threshold} outside (0,1)")
    analyzed = len(store)
    flagged = store.count(QueryFilter(min_toxicity=threshold))
    posted = sum(
        1
        for record in store.query()
        if record.decision is not None and record.decision.action is Action.POSTED
    )
    return ElectionReport(
        election_id=election.id,
        days_in_operation=election.days_in_operation,
        report_threshold=threshold,
        candidates_tracked=len(candidates),
        tweets_analyzed=analyzed,
        tweets_flagged=flagged,
        positives_sent=posted,
    )


def candidate_reports(
    store: Store,
    candidates: Sequence[Candidate],
    threshold: float,
    lexicon: Sequence[LexiconEntry] = (),
) -> list[CandidateReport]:
    """Per-candidate mention counts, toxic shares, and lexicon rows.

    Shares are percentages of the summed per-candidate toxic counts; when
    nothing is toxic every share is 0 rather than an error.
    """
    totals: dict[str, int] = {}
    toxics: dict[str, int] = {}
    for c in candidates:
        totals[c.handle] = store.count(QueryFilter(candidate_handle=c.handle))
        toxics[c.handle] = store.count(QueryFilter(candidate_handle=c.handle, min_toxicity=threshold))
    total_toxic = sum(toxics.values())
    reports = []
    for c in candidates:
        rows = []
        for entry in lexicon:
            if entry.target_handle != c.handle:
                continue
            counts = count_lexicon_matches(store, entry, threshold)
            rows.append(
                {
                    "term": entry.canonical_term,
                    "matches": counts.matches,
                    "toxic_matches": counts.toxic_matches,
                    "false_negatives": false_negatives(counts.matches, counts.toxic_matches),
                }
            )
        share = candidate_share(toxics[c.handle], total_toxic) if total_toxic else 0
        reports.append(
            CandidateReport(
                handle=c.handle,
                total_tweets=totals[c.handle],
                toxic_tweets=toxics[c.handle],
                share_of_total_toxic=share,
                lexicon_rows=tuple(rows),
            )
        )
    return reports


# --- presentation -----------------------------------------------------------


def report_payload(election: ElectionReport, candidates: Sequence[CandidateReport]) -> dict:
    """The machine-readable report body. The CLI and the HTTP service both
    serialize this dict with common.dump_json, which is what makes their
    outputs byte-identical on the same snapshot."""
    return {
        "election": {
            "election_id": election.election_id,
            "days_in_operation": election.days_in_operation,
            "report_threshold": election.report_threshold,
            "candidates_tracked": election.candidates_tracked,
            "tweets_analyzed": election.tweets_analyzed,
            "tweets_flagged": election.tweets_flagged,
            "positives_sent": election.positives_sent,
        },
        "candidates": [
            {
                "handle": c.handle,
                "total_tweets": c.total_tweets,
                "toxic_tweets": c.toxic_tweets,
                "share_of_total_toxic": c.share_of_total_toxic,
                "lexicon_rows": list(c.lexicon_rows),
            }
            for c in candidates
        ],
    }


def render_election_row(report: ElectionReport) -> str:
    return (
        f"{report.tweets_analyzed:,} / {report.tweets_flagged:,} / {report.positives_sent:,}"
    )


def render_election_table(report: ElectionReport) -> str:
    lines = [
        f"Election {report.election_id} (threshold {report.report_threshold})",
        "Counts are per candidate mention: a tweet naming several tracked",
        "candidates counts once for each.",
        "",
        f"  Days in operation    {report.days_in_operation}",
        f"  Candidates tracked   {report.candidates_tracked}",
        f"  Tweets analysed      {report.tweets_analyzed:,}",
        f"  Tweets flagged       {report.tweets_flagged:,}",
        f"  Positivtweets sent   {report.positives_sent:,}",
        "",
        f"  analysed / flagged / sent: {render_election_row(report)}",
    ]
    return "\n".join(lines) + "\n"


def render_candidate_table(reports: Sequence[CandidateReport]) -> str:
    lines = [f"{'handle':<20} {'mentions':>12} {'toxic':>10} {'share':>6}"]
    for r in reports:
        lines.append(
            f"{r.handle:<20} {r.total_tweets:>12,} {r.toxic_tweets:>10,} {r.share_of_total_toxic:>5}%"
        )
    return "\n".join(lines) + "\n"


def render_lexicon_table(reports: Sequence[CandidateReport]) -> str:
    lines = [f"{'handle':<20} {'term':<18} {'matches':>9} {'toxic':>7} {'false neg':>10}"]
    for r in reports:
        for row in r.lexicon_rows:
            lines.append(
                f"{r.handle:<20} {row['term']:<18} {row['matches']:>9,}"
                f" {row['toxic_matches']:>7,} {row['false_negatives']:>10,}"
            )
    return "\n".join(lines) + "\n"
