"""Inter-annotator study machinery: sampling flagged tweets, assigning them
to annotators with a shared overlap set, collecting labels, and computing the
false-positive split and Fleiss' kappa.

Annotators see scoring_text only: no author, no thread context. UNDECIDED
majorities (possible with an even rater count) are reported but excluded
from percentage denominators.
"""

import csv
import json
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from random import Random
from typing import Callable, Iterable, Mapping, Sequence

from .common import format_rfc3339, integer_percent, parse_rfc3339
from .errors import ParityError
from .store import QueryFilter, Store, StoredRecord

DEFAULT_INSTRUCTIONS = (
    "Read the tweet and label it TOXIC or NOT_TOXIC. Use your own judgment; "
    "there are no further rules."
)


class LabelValue(Enum):
    TOXIC = "TOXIC"
    NOT_TOXIC = "NOT_TOXIC"


class MajorityLabel(Enum):
    TOXIC = "TOXIC"
    NOT_TOXIC = "NOT_TOXIC"
    UNDECIDED = "UNDECIDED"


@dataclass(frozen=True)
class AnnotationPlan:
    sample_size: int
    annotators: tuple[str, ...]
    per_annotator_unique: int
    overlap_size: int
    source_threshold: float
    seed: int
    instructions: str = DEFAULT_INSTRUCTIONS

    def __post_init__(self):
        if len(self.annotators) < 2:
            raise ParityError("PLAN_INVALID", "a plan needs at least two annotators")
        if len(set(self.annotators)) != len(self.annotators):
            raise ParityError("PLAN_INVALID", "annotator ids must be distinct")
        if self.per_annotator_unique < 0 or self.overlap_size < 0:
            raise ParityError("PLAN_INVALID", "sizes must be nonnegative")
        if not 0.0 < self.source_threshold < 1.0:
            raise ParityError("PLAN_INVALID", f"source threshold {self.source_threshold} outside (0,1)")
        expected = len(self.annotators) * self.per_annotator_unique + self.overlap_size
        if self.sample_size != expected:
            raise ParityError(
                "PLAN_SIZE_MISMATCH",
                f"sample_size {self.sample_size} != "
                f"{len(self.annotators)} x {self.per_annotator_unique} + {self.overlap_size}",
            )


@dataclass(frozen=True)
class Label:
    tweet_id: str
    annotator_id: str
    value: LabelValue
    labeled_at: datetime


@dataclass(frozen=True)
class Assignment:
    unique: tuple[str, ...]
    overlap: tuple[str, ...]

    @property
    def task_order(self) -> tuple[str, ...]:
        """Fixed serving order: unique tasks first, then the overlap set."""
        return self.unique + self.overlap


@dataclass(frozen=True)
class LabelMatrix:
    """Fleiss-shaped counts: N items, n raters each, k categories."""

    counts: tuple[tuple[int, ...], ...]
    n: int

    def __post_init__(self):
        if not self.counts:
            raise ParityError("MATRIX_INVALID", "matrix needs at least one item")
        k = len(self.counts[0])
        if k < 2:
            raise ParityError("MATRIX_INVALID", "matrix needs at least two categories")
        for i, row in enumerate(self.counts):
            if len(row) != k:
                raise ParityError("MATRIX_INVALID", f"row {i} has {len(row)} categories, expected {k}")
            if any(c < 0 for c in row):
                raise ParityError("MATRIX_INVALID", f"row {i} has a negative count")
            if sum(row) != self.n:
                raise ParityError("MATRIX_INVALID", f"row {i} sums to {sum(row)}, expected {self.n}")

    @property
    def N(self) -> int:
        return len(self.counts)

    @property
    def k(self) -> int:
        return len(self.counts[0])


def draw_sample(store: Store, threshold: float, n: int, seed: int) -> list[StoredRecord]:
    """Uniform sample without replacement from the flagged population
    (TOXICITY strictly above threshold), deterministic per seed."""
    population = list(store.query(QueryFilter(min_toxicity=threshold)))
    if len(population) < n:
        raise ParityError(
            "POPULATION_TOO_SMALL",
            f"flagged population has {len(population)} tweets, need {n}",
        )
    return Random(seed).sample(population, n)


def assign(plan: AnnotationPlan, sample_ids: Sequence[str]) -> dict[str, Assignment]:
    """Split the sample into per-annotator unique slices plus one shared
    overlap set. The split is positional over the (already randomized)
    sample, so it is deterministic."""
    ids = list(sample_ids)
    if len(ids) != plan.sample_size:
        raise ParityError(
            "PLAN_SIZE_MISMATCH", f"sample has {len(ids)} tweets, plan expects {plan.sample_size}"
        )
    if len(set(ids)) != len(ids):
        raise ParityError("PLAN_SIZE_MISMATCH", "sample contains duplicate tweet ids")
    overlap = tuple(ids[: plan.overlap_size])
    assignments = {}
    cursor = plan.overlap_size
    for annotator in plan.annotators:
        unique = tuple(ids[cursor : cursor + plan.per_annotator_unique])
        cursor += plan.per_annotator_unique
        assignments[annotator] = Assignment(unique=unique, overlap=overlap)
    return assignments


def majority_label(values: Iterable[LabelValue]) -> MajorityLabel:
    """Strict majority wins; an exact tie is UNDECIDED."""
    toxic = 0
    not_toxic = 0
    for v in values:
        if v is LabelValue.TOXIC:
            toxic += 1
        else:
            not_toxic += 1
    if toxic + not_toxic == 0:
        raise ParityError("NO_LABELS", "majority of zero labels is undefined")
    if toxic > not_toxic:
        return MajorityLabel.TOXIC
    if not_toxic > toxic:
        return MajorityLabel.NOT_TOXIC
    return MajorityLabel.UNDECIDED


def fleiss_kappa(matrix: LabelMatrix) -> float:
    """Chance-corrected agreement for n raters per item over k categories.

    Undefined when all mass sits in a single category (expected agreement 1);
    that case raises DEGENERATE_AGREEMENT rather than returning anything.
    """
    if matrix.n < 2:
        raise ParityError("MATRIX_INVALID", "kappa needs at least two raters per item")
    N, n, k = matrix.N, matrix.n, matrix.k
    column_sums = [sum(row[j] for row in matrix.counts) for j in range(k)]
    total = N * n
    if max(column_sums) == total:
        raise ParityError(
            "DEGENERATE_AGREEMENT",
            "every rater used a single category; expected agreement is 1 and kappa is undefined",
        )
    p = [c / total for c in column_sums]
    p_bar = sum(sum(c * c for c in row) - n for row in matrix.counts) / (N * n * (n - 1))
    p_e = sum(x * x for x in p)
    return (p_bar - p_e) / (1 - p_e)


@dataclass(frozen=True)
class FpReport:
    toxic_count: int
    not_toxic_count: int
    undecided_count: int
    toxic_pct: int | None
    not_toxic_pct: int | None


def fp_report(majorities: Iterable[MajorityLabel]) -> FpReport:
    """Partition majority labels and take integer-percent shares of the
    decided items. With nothing decided the percentages are undefined (None;
    rendered as an em dash in tables)."""
    toxic = not_toxic = undecided = 0
    for m in majorities:
        if m is MajorityLabel.TOXIC:
            toxic += 1
        elif m is MajorityLabel.NOT_TOXIC:
            not_toxic += 1
        else:
            undecided += 1
    decided = toxic + not_toxic
    return FpReport(
        toxic_count=toxic,
        not_toxic_count=not_toxic,
        undecided_count=undecided,
        toxic_pct=integer_percent(toxic, decided) if decided else None,
        not_toxic_pct=integer_percent(not_toxic, decided) if decided else None,
    )


CATEGORY_ORDER = (LabelValue.TOXIC, LabelValue.NOT_TOXIC)


def matrix_from_labels(labels: Iterable[Label]) -> LabelMatrix:
    """Group labels by tweet and count per category. Fleiss' statistic needs
    the same number of raters on every item; uneven items are an error."""
    by_tweet: dict[str, dict[LabelValue, int]] = {}
    seen: set[tuple[str, str]] = set()
    for label in labels:
        key = (label.tweet_id, label.annotator_id)
        if key in seen:
            raise ParityError("DUPLICATE_LABEL", f"{label.annotator_id} labeled {label.tweet_id} twice")
        seen.add(key)
        counts = by_tweet.setdefault(label.tweet_id, {v: 0 for v in CATEGORY_ORDER})
        counts[label.value] += 1
    if not by_tweet:
        raise ParityError("NO_LABELS", "no labels to build a matrix from")
    sizes = {sum(c.values()) for c in by_tweet.values()}
    if len(sizes) != 1:
        raise ParityError(
            "UNEVEN_RATINGS", f"items have differing rater counts: {sorted(sizes)}"
        )
    n = sizes.pop()
    rows = tuple(
        tuple(by_tweet[tid][v] for v in CATEGORY_ORDER) for tid in sorted(by_tweet)
    )
    return LabelMatrix(counts=rows, n=n)


# --- the live study ----------------------------------------------------------


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class AnnotationStudy:
    """Plan + sample + assignments + collected labels, with concurrent-safe
    submission (one label per tweet and annotator, assigned tweets only)."""

    def __init__(
        self,
        plan: AnnotationPlan,
        sample_texts: Mapping[str, str],
        assignments: dict[str, Assignment] | None = None,
        clock: Callable[[], datetime] = _utcnow,
    ):
        if len(sample_texts) != plan.sample_size:
            raise ParityError(
                "PLAN_SIZE_MISMATCH",
                f"sample has {len(sample_texts)} texts, plan expects {plan.sample_size}",
            )
        self.plan = plan
        self.sample_texts = dict(sample_texts)
        self.assignments = assignments or assign(plan, list(self.sample_texts))
        self._clock = clock
        self._labels: dict[tuple[str, str], Label] = {}
        self._lock = threading.Lock()

    def _assignment(self, annotator_id: str) -> Assignment:
        assignment = self.assignments.get(annotator_id)
        if assignment is None:
            raise ParityError("UNKNOWN_ANNOTATOR", f"{annotator_id!r} is not in the plan")
        return assignment

    def next_task(self, annotator_id: str) -> dict | None:
        """The annotator's first unlabeled assignment in the fixed task order,
        or None when everything is labeled."""
        assignment = self._assignment(annotator_id)
        with self._lock:
            labeled = {t for (t, a) in self._labels if a == annotator_id}
        for tweet_id in assignment.task_order:
            if tweet_id not in labeled:
                return {
                    "tweet_id": tweet_id,
                    "text": self.sample_texts[tweet_id],
                    "instructions": self.plan.instructions,
                    "labeled": len(labeled),
                    "assigned": len(assignment.task_order),
                }
        return None

    def submit_label(self, tweet_id: str, annotator_id: str, value: LabelValue) -> Label:
        assignment = self._assignment(annotator_id)
        if tweet_id not in assignment.task_order:
            raise ParityError("NOT_ASSIGNED", f"{tweet_id!r} is not assigned to {annotator_id!r}")
        with self._lock:
            key = (tweet_id, annotator_id)
            if key in self._labels:
                raise ParityError("DUPLICATE_LABEL", f"{annotator_id!r} already labeled {tweet_id!r}")
            label = Label(
                tweet_id=tweet_id, annotator_id=annotator_id, value=value, labeled_at=self._clock()
            )
            self._labels[key] = label
            return label

    def labels(self) -> list[Label]:
        with self._lock:
            return list(self._labels.values())

    def progress(self, annotator_id: str) -> tuple[int, int]:
        assignment = self._assignment(annotator_id)
        with self._lock:
            labeled = sum(1 for (t, a) in self._labels if a == annotator_id)
        return labeled, len(assignment.task_order)

    def overlap_matrix(self) -> LabelMatrix:
        """Agreement matrix over overlap items every annotator has labeled."""
        overlap = set(next(iter(self.assignments.values())).overlap)
        complete = []
        with self._lock:
            for tweet_id in sorted(overlap):
                item = [
                    self._labels[(tweet_id, a)]
                    for a in self.plan.annotators
                    if (tweet_id, a) in self._labels
                ]
                if len(item) == len(self.plan.annotators):
                    complete.extend(item)
        return matrix_from_labels(complete)

    def agreement(self) -> dict:
        """The payload behind the agreement endpoint: majority split over all
        labeled sample items plus kappa over the completed overlap set."""
        with self._lock:
            by_tweet: dict[str, list[LabelValue]] = {}
            for label in self._labels.values():
                by_tweet.setdefault(label.tweet_id, []).append(label.value)
        report = fp_report(majority_label(vs) for vs in by_tweet.values())
        kappa: float | None
        kappa_note: str | None = None
        try:
            kappa = fleiss_kappa(self.overlap_matrix())
        except ParityError as exc:
            kappa = None
            kappa_note = exc.code
        return {
            "sample_size": self.plan.sample_size,
            "labeled_items": len(by_tweet),
            "toxic_count": report.toxic_count,
            "not_toxic_count": report.not_toxic_count,
            "undecided_count": report.undecided_count,
            "toxic_pct": report.toxic_pct,
            "not_toxic_pct": report.not_toxic_pct,
            "kappa": kappa,
            "kappa_note": kappa_note,
        }


# --- file formats ------------------------------------------------------------


def plan_to_json(plan: AnnotationPlan) -> dict:
    return {
        "sample_size": plan.sample_size,
        "annotators": list(plan.annotators),
        "per_annotator_unique": plan.per_annotator_unique,
        "overlap_size": plan.overlap_size,
        "source_threshold": plan.source_threshold,
        "seed": plan.seed,
        "instructions": plan.instructions,
    }


def plan_from_json(obj: dict) -> AnnotationPlan:
    return AnnotationPlan(
        sample_size=obj["sample_size"],
        annotators=tuple(obj["annotators"]),
        per_annotator_unique=obj["per_annotator_unique"],
        overlap_size=obj["overlap_size"],
        source_threshold=obj["source_threshold"],
        seed=obj["seed"],
        instructions=obj.get("instructions", DEFAULT_INSTRUCTIONS),
    )


def study_to_json(study: AnnotationStudy) -> dict:
    return {
        "plan": plan_to_json(study.plan),
        "sample": [
            {"tweet_id": tid, "text": text} for tid, text in study.sample_texts.items()
        ],
        "assignments": {
            a: {"unique": list(asg.unique), "overlap": list(asg.overlap)}
            for a, asg in study.assignments.items()
        },
    }


def study_from_json(obj: dict) -> AnnotationStudy:
    plan = plan_from_json(obj["plan"])
    sample_texts = {item["tweet_id"]: item["text"] for item in obj["sample"]}
    assignments = {
        a: Assignment(unique=tuple(asg["unique"]), overlap=tuple(asg["overlap"]))
        for a, asg in obj["assignments"].items()
    }
    return AnnotationStudy(plan, sample_texts, assignments)


LABEL_COLUMNS = ["tweet_id", "annotator_id", "value", "labeled_at"]


def write_labels_csv(labels: Iterable[Label], path: str | Path) -> int:
    count = 0
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=LABEL_COLUMNS)
        writer.writeheader()
        for label in labels:
            writer.writerow(
                {
                    "tweet_id": label.tweet_id,
                    "annotator_id": label.annotator_id,
                    "value": label.value.value,
                    "labeled_at": format_rfc3339(label.labeled_at),
                }
            )
            count += 1
    return count


def read_labels_csv(path: str | Path) -> list[Label]:
    path = Path(path)
    if not path.exists():
        raise ParityError("NO_LABELS", f"label file not found: {path}")
    labels = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in LABEL_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise ParityError("NO_LABELS", f"label header missing columns: {', '.join(missing)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                value = LabelValue(row["value"].strip().upper())
            except ValueError:
                raise ParityError("NO_LABELS", f"line {lineno}: unknown label {row['value']!r}")
            labels.append(
                Label(
                    tweet_id=row["tweet_id"].strip(),
                    annotator_id=row["annotator_id"].strip(),
                    value=value,
                    labeled_at=parse_rfc3339(row["labeled_at"]),
                )
            )
    return labels


def save_study(study: AnnotationStudy, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(study_to_json(study), ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )


def load_study(path: str | Path) -> AnnotationStudy:
    path = Path(path)
    if not path.exists():
        raise ParityError("NO_ACTIVE_PLAN", f"study file not found: {path}")
    return study_from_json(json.loads(path.read_text(encoding="utf-8")))
