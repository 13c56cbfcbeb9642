from fractions import Fraction
from math import comb

import pytest
from conftest import make_record, ts
from hypothesis import given, settings
from hypothesis import strategies as st

from paritybot.errors import ParityError
from paritybot.evaluation import (
    AnnotationPlan,
    AnnotationStudy,
    Label,
    LabelMatrix,
    LabelValue,
    MajorityLabel,
    assign,
    draw_sample,
    fleiss_kappa,
    fp_report,
    load_study,
    majority_label,
    matrix_from_labels,
    plan_from_json,
    plan_to_json,
    read_labels_csv,
    save_study,
    study_from_json,
    study_to_json,
    write_labels_csv,
)

T = LabelValue.TOXIC
N = LabelValue.NOT_TOXIC


def _plan(annotators=("a", "b", "c"), unique=100, overlap=55, seed=7):
    return AnnotationPlan(
        sample_size=len(annotators) * unique + overlap,
        annotators=tuple(annotators),
        per_annotator_unique=unique,
        overlap_size=overlap,
        source_threshold=0.9,
        seed=seed,
    )


class TestAnnotationPlan:
    def test_paper_arithmetic(self):
        plan = _plan()
        assert plan.sample_size == 355

    def test_size_mismatch(self):
        with pytest.raises(ParityError) as err:
            AnnotationPlan(
                sample_size=354,
                annotators=("a", "b", "c"),
                per_annotator_unique=100,
                overlap_size=55,
                source_threshold=0.9,
                seed=1,
            )
        assert err.value.code == "PLAN_SIZE_MISMATCH"

    def test_needs_two_annotators(self):
        with pytest.raises(ParityError) as err:
            _plan(annotators=("solo",), unique=1, overlap=0)
        assert err.value.code == "PLAN_INVALID"

    def test_duplicate_annotators(self):
        with pytest.raises(ParityError):
            _plan(annotators=("a", "a"))

    def test_threshold_domain(self):
        with pytest.raises(ParityError):
            AnnotationPlan(
                sample_size=2,
                annotators=("a", "b"),
                per_annotator_unique=1,
                overlap_size=0,
                source_threshold=1.0,
                seed=1,
            )

    def test_json_round_trip(self):
        plan = _plan()
        assert plan_from_json(plan_to_json(plan)) == plan


class TestDrawSample:
    def _flagged_store(self, store, flagged=8, benign=4):
        for i in range(flagged):
            store.append(make_record(f"hot{i}", "vile take", 0.95, at=ts(1, 12, i)))
        for i in range(benign):
            store.append(make_record(f"ok{i}", "nice take", 0.1, at=ts(1, 13, i)))
        return store

    def test_deterministic_per_seed(self, empty_store):
        store = self._flagged_store(empty_store)
        a = [r.raw.id for r in draw_sample(store, 0.9, 5, seed=3)]
        b = [r.raw.id for r in draw_sample(store, 0.9, 5, seed=3)]
        assert a == b

    def test_samples_only_flagged(self, empty_store):
        store = self._flagged_store(empty_store)
        sample = draw_sample(store, 0.9, 8, seed=1)
        assert all(r.scores.toxicity > 0.9 for r in sample)
        assert len({r.raw.id for r in sample}) == 8

    def test_whole_population(self, empty_store):
        store = self._flagged_store(empty_store)
        sample = draw_sample(store, 0.9, 8, seed=2)
        assert {r.raw.id for r in sample} == {f"hot{i}" for i in range(8)}

    def test_population_too_small(self, empty_store):
        store = self._flagged_store(empty_store)
        with pytest.raises(ParityError) as err:
            draw_sample(store, 0.9, 9, seed=2)
        assert err.value.code == "POPULATION_TOO_SMALL"


class TestAssign:
    def test_paper_plan_shapes(self):
        plan = _plan()
        ids = [f"s{i:04d}" for i in range(355)]
        assignments = assign(plan, ids)
        assert set(assignments) == {"a", "b", "c"}
        uniques = [set(asg.unique) for asg in assignments.values()]
        overlaps = [set(asg.overlap) for asg in assignments.values()]
        assert all(len(u) == 100 for u in uniques)
        assert all(len(o) == 55 for o in overlaps)
        assert overlaps[0] == overlaps[1] == overlaps[2]
        assert uniques[0] & uniques[1] == set()
        assert uniques[0] & uniques[2] == set()
        assert uniques[1] & uniques[2] == set()
        union = set().union(*uniques, overlaps[0])
        assert union == set(ids)

    def test_pure_overlap(self):
        plan = _plan(annotators=("a", "b"), unique=0, overlap=10)
        assignments = assign(plan, [f"s{i}" for i in range(10)])
        assert assignments["a"] == assignments["b"]
        assert len(assignments["a"].overlap) == 10
        assert assignments["a"].unique == ()

    def test_wrong_sample_size(self):
        with pytest.raises(ParityError) as err:
            assign(_plan(), [f"s{i}" for i in range(354)])
        assert err.value.code == "PLAN_SIZE_MISMATCH"

    def test_duplicate_sample_ids(self):
        plan = _plan(annotators=("a", "b"), unique=1, overlap=0)
        with pytest.raises(ParityError):
            assign(plan, ["dup", "dup"])

    @settings(deadline=None, max_examples=50)
    @given(
        annotator_count=st.integers(min_value=2, max_value=5),
        unique=st.integers(min_value=0, max_value=20),
        overlap=st.integers(min_value=0, max_value=10),
    )
    def test_partition_property(self, annotator_count, unique, overlap):
        annotators = tuple(f"ann{i}" for i in range(annotator_count))
        plan = _plan(annotators=annotators, unique=unique, overlap=overlap)
        ids = [f"s{i:05d}" for i in range(plan.sample_size)]
        assignments = assign(plan, ids)
        all_unique = [asg.unique for asg in assignments.values()]
        flattened = [tid for chunk in all_unique for tid in chunk]
        assert len(flattened) == len(set(flattened))  # disjoint uniques
        overlaps = {asg.overlap for asg in assignments.values()}
        assert len(overlaps) == 1  # identical overlap set
        union = set(flattened) | set(next(iter(overlaps)))
        assert union == set(ids)


class TestMajority:
    def test_two_of_three(self):
        assert majority_label([T, T, N]) is MajorityLabel.TOXIC

    def test_tie(self):
        assert majority_label([T, N]) is MajorityLabel.UNDECIDED

    def test_singleton(self):
        assert majority_label([N]) is MajorityLabel.NOT_TOXIC

    def test_empty(self):
        with pytest.raises(ParityError) as err:
            majority_label([])
        assert err.value.code == "NO_LABELS"


def oracle_kappa(counts, n):
    """Independent pair-counting formulation in exact arithmetic.

    Per item, agreement is the fraction of rater pairs that agree; expected
    agreement is the sum of squared category shares.
    """
    big_n = len(counts)
    pairs = comb(n, 2)
    p_bar = Fraction(sum(sum(comb(c, 2) for c in row) for row in counts), big_n * pairs)
    k = len(counts[0])
    shares = [Fraction(sum(row[j] for row in counts), big_n * n) for j in range(k)]
    p_e = sum(s * s for s in shares)
    if p_e == 1:
        return None  # degenerate: a single category holds everything
    return (p_bar - p_e) / (1 - p_e)


@st.composite
def label_matrices(draw):
    n = draw(st.integers(min_value=2, max_value=5))
    k = draw(st.integers(min_value=2, max_value=4))
    big_n = draw(st.integers(min_value=1, max_value=20))
    rows = []
    for _ in range(big_n):
        votes = draw(st.lists(st.integers(0, k - 1), min_size=n, max_size=n))
        rows.append(tuple(votes.count(j) for j in range(k)))
    return LabelMatrix(counts=tuple(rows), n=n)


class TestFleissKappa:
    def test_hand_computed_example(self):
        matrix = LabelMatrix(counts=((3, 0), (1, 2)), n=3)
        assert abs(fleiss_kappa(matrix) - 0.25) < 1e-9

    def test_perfect_agreement_across_categories(self):
        matrix = LabelMatrix(counts=((3, 0), (0, 3)), n=3)
        assert fleiss_kappa(matrix) == 1.0

    def test_degenerate_single_category(self):
        matrix = LabelMatrix(counts=((3, 0), (3, 0)), n=3)
        with pytest.raises(ParityError) as err:
            fleiss_kappa(matrix)
        assert err.value.code == "DEGENERATE_AGREEMENT"

    def test_single_rater_invalid(self):
        matrix = LabelMatrix(counts=((1, 0), (0, 1)), n=1)
        with pytest.raises(ParityError) as err:
            fleiss_kappa(matrix)
        assert err.value.code == "MATRIX_INVALID"

    def test_matrix_row_sums_validated(self):
        with pytest.raises(ParityError):
            LabelMatrix(counts=((2, 0), (1, 2)), n=3)

    def test_negative_counts_rejected(self):
        with pytest.raises(ParityError):
            LabelMatrix(counts=((4, -1),), n=3)

    @settings(deadline=None, max_examples=200)
    @given(matrix=label_matrices())
    def test_agrees_with_pair_counting_oracle(self, matrix):
        expected = oracle_kappa(matrix.counts, matrix.n)
        if expected is None:
            with pytest.raises(ParityError):
                fleiss_kappa(matrix)
        else:
            assert abs(fleiss_kappa(matrix) - float(expected)) < 1e-9

    @settings(deadline=None, max_examples=60)
    @given(matrix=label_matrices())
    def test_permutation_invariance(self, matrix):
        try:
            base = fleiss_kappa(matrix)
        except ParityError:
            return
        rows_reversed = LabelMatrix(counts=tuple(reversed(matrix.counts)), n=matrix.n)
        cols_reversed = LabelMatrix(
            counts=tuple(tuple(reversed(row)) for row in matrix.counts), n=matrix.n
        )
        assert abs(fleiss_kappa(rows_reversed) - base) < 1e-12
        assert abs(fleiss_kappa(cols_reversed) - base) < 1e-12


class TestFpReport:
    def test_study_totals(self):
        majorities = [MajorityLabel.TOXIC] * 184 + [MajorityLabel.NOT_TOXIC] * 171
        report = fp_report(majorities)
        assert report.toxic_count == 184
        assert report.not_toxic_count == 171
        assert report.undecided_count == 0
        assert report.toxic_pct == 52
        assert report.not_toxic_pct == 48

    def test_overlap_split(self):
        majorities = [MajorityLabel.TOXIC] * 33 + [MajorityLabel.NOT_TOXIC] * 22
        assert fp_report(majorities).toxic_pct == 60

    def test_empty(self):
        report = fp_report([])
        assert (report.toxic_count, report.not_toxic_count, report.undecided_count) == (0, 0, 0)
        assert report.toxic_pct is None
        assert report.not_toxic_pct is None

    def test_undecided_excluded_from_denominator(self):
        majorities = [MajorityLabel.TOXIC, MajorityLabel.NOT_TOXIC, MajorityLabel.UNDECIDED]
        report = fp_report(majorities)
        assert report.undecided_count == 1
        assert report.toxic_pct == 50

    @given(
        st.lists(
            st.sampled_from([MajorityLabel.TOXIC, MajorityLabel.NOT_TOXIC, MajorityLabel.UNDECIDED]),
            max_size=60,
        )
    )
    def test_counts_partition_the_sample(self, majorities):
        report = fp_report(majorities)
        assert report.toxic_count + report.not_toxic_count + report.undecided_count == len(majorities)


class TestMatrixFromLabels:
    def _label(self, tweet_id, annotator, value):
        return Label(tweet_id=tweet_id, annotator_id=annotator, value=value, labeled_at=ts(5))

    def test_builds_sorted_rows(self):
        labels = [
            self._label("t2", "a", T),
            self._label("t2", "b", T),
            self._label("t1", "a", T),
            self._label("t1", "b", N),
        ]
        matrix = matrix_from_labels(labels)
        assert matrix.counts == ((1, 1), (2, 0))  # t1 row first
        assert matrix.n == 2

    def test_duplicate_label_rejected(self):
        labels = [self._label("t1", "a", T), self._label("t1", "a", N)]
        with pytest.raises(ParityError) as err:
            matrix_from_labels(labels)
        assert err.value.code == "DUPLICATE_LABEL"

    def test_empty_rejected(self):
        with pytest.raises(ParityError) as err:
            matrix_from_labels([])
        assert err.value.code == "NO_LABELS"

    def test_uneven_ratings_rejected(self):
        labels = [
            self._label("t1", "a", T),
            self._label("t1", "b", T),
            self._label("t2", "a", T),
        ]
        with pytest.raises(ParityError) as err:
            matrix_from_labels(labels)
        assert err.value.code == "UNEVEN_RATINGS"


class TestLabelCsv:
    def test_round_trip(self, tmp_path):
        labels = [
            Label("t1", "a", T, ts(5, 10)),
            Label("t1", "b", N, ts(5, 11)),
        ]
        path = tmp_path / "labels.csv"
        assert write_labels_csv(labels, path) == 2
        assert read_labels_csv(path) == labels

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParityError) as err:
            read_labels_csv(tmp_path / "absent.csv")
        assert err.value.code == "NO_LABELS"

    def test_missing_column(self, tmp_path):
        path = tmp_path / "labels.csv"
        path.write_text("tweet_id,annotator_id\n", encoding="utf-8")
        with pytest.raises(ParityError):
            read_labels_csv(path)

    def test_lowercase_values_accepted(self, tmp_path):
        path = tmp_path / "labels.csv"
        path.write_text(
            "tweet_id,annotator_id,value,labeled_at\nt1,a,toxic,2019-10-05T10:00:00Z\n",
            encoding="utf-8",
        )
        assert read_labels_csv(path)[0].value is T

    def test_unknown_value_rejected(self, tmp_path):
        path = tmp_path / "labels.csv"
        path.write_text(
            "tweet_id,annotator_id,value,labeled_at\nt1,a,MAYBE,2019-10-05T10:00:00Z\n",
            encoding="utf-8",
        )
        with pytest.raises(ParityError):
            read_labels_csv(path)


class TestStudy:
    def _study(self):
        plan = _plan(annotators=("a", "b"), unique=1, overlap=1, seed=2)
        texts = {"s0": "overlap tweet", "s1": "unique for a", "s2": "unique for b"}
        return AnnotationStudy(plan, texts)

    def test_task_order_unique_then_overlap(self):
        study = self._study()
        first = study.next_task("a")
        assert first["tweet_id"] == "s1"
        assert first["assigned"] == 2
        assert first["labeled"] == 0
        study.submit_label("s1", "a", T)
        second = study.next_task("a")
        assert second["tweet_id"] == "s0"
        assert second["labeled"] == 1

    def test_completion_returns_none(self):
        study = self._study()
        study.submit_label("s1", "a", T)
        study.submit_label("s0", "a", N)
        assert study.next_task("a") is None
        assert study.progress("a") == (2, 2)

    def test_unknown_annotator(self):
        study = self._study()
        with pytest.raises(ParityError) as err:
            study.next_task("nobody")
        assert err.value.code == "UNKNOWN_ANNOTATOR"

    def test_not_assigned(self):
        study = self._study()
        with pytest.raises(ParityError) as err:
            study.submit_label("s2", "a", T)
        assert err.value.code == "NOT_ASSIGNED"

    def test_duplicate_label(self):
        study = self._study()
        study.submit_label("s1", "a", T)
        with pytest.raises(ParityError) as err:
            study.submit_label("s1", "a", T)
        assert err.value.code == "DUPLICATE_LABEL"

    def test_agreement_payload(self):
        plan = _plan(annotators=("a", "b"), unique=0, overlap=2, seed=3)
        study = AnnotationStudy(plan, {"s0": "first", "s1": "second"})
        for annotator in ("a", "b"):
            study.submit_label("s0", annotator, T)
            study.submit_label("s1", annotator, N)
        payload = study.agreement()
        assert payload["labeled_items"] == 2
        assert payload["toxic_count"] == 1
        assert payload["not_toxic_count"] == 1
        assert payload["toxic_pct"] == 50
        assert payload["kappa"] == 1.0
        assert payload["kappa_note"] is None

    def test_agreement_before_overlap_complete(self):
        study = self._study()
        study.submit_label("s1", "a", T)
        payload = study.agreement()
        assert payload["kappa"] is None
        assert payload["kappa_note"] is not None

    def test_study_json_round_trip(self):
        study = self._study()
        clone = study_from_json(study_to_json(study))
        assert clone.plan == study.plan
        assert clone.sample_texts == study.sample_texts
        assert clone.assignments == study.assignments

    def test_save_and_load(self, tmp_path):
        study = self._study()
        path = tmp_path / "study.json"
        save_study(study, path)
        loaded = load_study(path)
        assert loaded.plan == study.plan

    def test_load_missing_study(self, tmp_path):
        with pytest.raises(ParityError) as err:
            load_study(tmp_path / "absent.json")
        assert err.value.code == "NO_ACTIVE_PLAN"
