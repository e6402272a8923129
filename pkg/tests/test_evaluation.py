import csv
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from reviewtox.corpus import Dataset, LabeledComment, load_dataset, stratified_folds
from reviewtox.evaluation import (
    ConfusionMatrix,
    betainc,
    cohen_kappa,
    confusion,
    cross_validate,
    metrics,
    one_sample_t_test,
    paired_t_test,
    results_csv,
    retro_export,
    t_cdf,
    tuning_sweep,
)
from reviewtox.models import Hyperparams
from reviewtox.preprocess import PreprocessConfig, preprocess_many
from reviewtox.rng import derive_seed
from reviewtox.vectorizer import tokenize

FAST_RF = Hyperparams("RF", rf_n_trees=20)


class TestConfusion:
    def test_hand_count(self):
        assert confusion([1, 1, 0, 0], [1, 0, 0, 1]) == ConfusionMatrix(tp=1, fp=1, tn=1, fn=1)

    def test_identity(self):
        cm = confusion([1, 0, 1, 1], [1, 0, 1, 1])
        assert cm.fp == cm.fn == 0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            confusion([1, 0], [1])

    def test_non_binary(self):
        with pytest.raises(ValueError):
            confusion([2, 0], [1, 0])


class TestMetrics:
    def test_published_matrix(self):
        m = metrics(ConfusionMatrix(tp=3259, fp=373, tn=15446, fn=483))
        assert m.p1 == pytest.approx(3259 / 3632, abs=1e-12)
        assert m.r1 == pytest.approx(3259 / 3742, abs=1e-12)
        assert m.accuracy == pytest.approx(18705 / 19561, abs=1e-12)

    def test_perfect(self):
        assert set(metrics(confusion([0, 1, 1], [0, 1, 1])).as_tuple()) == {1.0}

    def test_zero_denominator(self):
        m = metrics(ConfusionMatrix(tp=0, fp=0, tn=5, fn=3))
        assert m.p1 == 0.0 and m.f1_1 == 0.0 and m.r1 == 0.0

    def test_empty(self):
        with pytest.raises(ValueError):
            metrics(ConfusionMatrix(0, 0, 0, 0))

    @given(st.tuples(*[st.integers(0, 500)] * 4).filter(lambda t: sum(t) > 0))
    def test_identities(self, counts):
        cm = ConfusionMatrix(*counts)
        m = metrics(cm)
        for p, r, f in ((m.p0, m.r0, m.f1_0), (m.p1, m.r1, m.f1_1)):
            assert abs(f - (2 * p * r / (p + r) if p + r else 0.0)) <= 1e-12
            assert 0 <= p <= 1 and 0 <= r <= 1
        assert abs(m.accuracy - (cm.tp + cm.tn) / cm.total) <= 1e-12


class TestTTests:
    def test_hand_computed_paired(self):
        t, p, df = paired_t_test([1, 2, 3, 4, 5], [0] * 5)
        assert t == pytest.approx(4.2426, abs=1e-4)
        assert p == pytest.approx(0.0132, abs=1e-4)
        assert df == 4

    def test_hand_computed_one_sample(self):
        t, p, _ = one_sample_t_test([0.94, 0.95, 0.96], 0.94)
        assert t == pytest.approx(1.7321, abs=1e-4)
        assert p == pytest.approx(0.2254, abs=1e-4)

    def test_identical_samples(self):
        a = [0.8, 0.9, 0.85]
        t, p, _ = paired_t_test(a, a)
        assert math.isnan(t) and p == 1.0

    def test_constant_nonzero_difference(self):
        t, p, _ = paired_t_test([2, 3, 4], [1, 2, 3])
        assert math.isnan(t) and p == 0.0

    def test_samples_equal_mu0(self):
        t, p, _ = one_sample_t_test([0.5, 0.5], 0.5)
        assert p == 1.0

    def test_zero_mean_difference(self):
        t, p, _ = one_sample_t_test([1.0, -1.0, 2.0, -2.0], 0.0)
        assert t == 0.0 and p == pytest.approx(1.0)

    def test_needs_two(self):
        with pytest.raises(ValueError):
            one_sample_t_test([1.0], 0.0)
        with pytest.raises(ValueError):
            paired_t_test([1, 2], [1])

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    @settings(max_examples=200)
    @given(st.lists(st.floats(-100, 100), min_size=2, max_size=40), st.floats(-10, 10))
    def test_against_scipy(self, xs, mu):
        t, p, _ = one_sample_t_test(xs, mu)
        if math.isnan(t):
            return
        ref = stats.ttest_1samp(xs, mu)
        assert t == pytest.approx(ref.statistic, rel=1e-9, abs=1e-9)
        assert p == pytest.approx(ref.pvalue, abs=1e-8)

    @pytest.mark.parametrize("df", [1, 2, 3, 7, 30, 49, 400])
    def test_cdf_against_scipy(self, df):
        for t in np.linspace(-12, 12, 97):
            assert t_cdf(t, df) == pytest.approx(stats.t.cdf(t, df), abs=1e-10)

    def test_betainc_against_scipy(self):
        from scipy.special import betainc as ref

        for a in (0.5, 1, 2.5, 24.5):
            for b in (0.5, 1, 3):
                for x in np.linspace(0, 1, 21):
                    assert betainc(a, b, x) == pytest.approx(ref(a, b, x), abs=1e-12)


class TestKappa:
    def test_identical(self):
        assert cohen_kappa([0, 1, 1, 0], [0, 1, 1, 0]) == 1.0

    def test_constant_equal_raters(self):
        assert cohen_kappa([1, 1, 1], [1, 1, 1]) == 1.0

    def test_constant_opposite_raters(self):
        # p_o = 0 but chance agreement p_e is also 0, so kappa is exactly 0
        assert cohen_kappa([0] * 6, [1] * 6) == 0.0

    def test_total_disagreement_with_variation(self):
        assert cohen_kappa([0, 1] * 3, [1, 0] * 3) == -1.0

    def test_independent_raters(self):
        rng = np.random.default_rng(2024)
        a = rng.random(10_000) < 0.3
        b = rng.random(10_000) < 0.4
        assert abs(cohen_kappa(a.astype(int), b.astype(int))) < 0.05

    def test_against_sklearn(self):
        from sklearn.metrics import cohen_kappa_score

        rng = np.random.default_rng(7)
        for _ in range(20):
            a = rng.integers(0, 2, 50)
            b = np.where(rng.random(50) < 0.7, a, 1 - a)
            assert cohen_kappa(a, b) == pytest.approx(cohen_kappa_score(a, b), abs=1e-12)


@pytest.fixture(scope="module")
def rf_report(bundled):
    return cross_validate(bundled, "RF", PreprocessConfig(count_profanity=True), FAST_RF, seed=11)


class TestCrossValidate:
    def test_profanity_separable_corpus_is_perfect(self, bundled):
        report = cross_validate(bundled, "RF", PreprocessConfig(count_profanity=True), seed=0)
        assert report.means.accuracy == 1.0

    def test_shape_and_means(self, rf_report):
        assert len(rf_report.runs) == 50
        acc = [r.metrics.accuracy for r in rf_report.runs]
        assert abs(rf_report.means.accuracy - sum(acc) / 50) <= 1e-12
        assert {(r.repeat, r.fold) for r in rf_report.runs} == {(r, f) for r in range(5) for f in range(10)}
        assert not np.isnan(rf_report.oof_scores).any()

    def test_deterministic(self, bundled, rf_report):
        again = cross_validate(bundled, "RF", PreprocessConfig(count_profanity=True), FAST_RF, seed=11)
        assert results_csv(again) == results_csv(rf_report)
        assert np.array_equal(again.oof_scores, rf_report.oof_scores)

    def test_same_partitions_for_every_algorithm(self, bundled, rf_report):
        other = cross_validate(bundled, "LR", PreprocessConfig(), k=10, repeats=5, seed=11)
        assert other.fold_plans == rf_report.fold_plans
        assert rf_report.fold_plans[2] == stratified_folds(bundled, 10, derive_seed(11, 2))

    def test_vocabulary_never_sees_test_fold(self, bundled):
        from reviewtox.vectorizer import DocumentTermCounts

        texts, _ = preprocess_many(bundled.texts)
        dtc = DocumentTermCounts(texts)
        plan = stratified_folds(bundled, 10, 3)
        assign = np.asarray(plan.assignments)
        for f in range(10):
            train = np.flatnonzero(assign != f)
            vocab = dtc.fit_vocabulary(train, min_df=2)
            train_terms = {t for i in train for t in tokenize(texts[i])}
            assert set(vocab.terms) <= train_terms

    def test_results_csv_layout(self, rf_report):
        rows = list(csv.reader(io.StringIO(results_csv(rf_report))))
        assert rows[0][0].startswith("# algo=RF;")
        assert rows[1][:2] == ["repeat", "fold"]
        assert len(rows) == 2 + 50 + 2
        assert [rows[-2][0], rows[-1][0]] == ["mean", "std"]
        assert "seconds" not in results_csv(rf_report)


class TestRetro:
    def _ds(self):
        return Dataset(tuple(LabeledComment(str(i), t, y) for i, (t, y) in
                             enumerate([("fine", 0), ("bad", 1), ("ok", 0), ("awful", 1)])))

    def test_perfect_is_header_only(self, tmp_path):
        p = tmp_path / "r.csv"
        assert retro_export(self._ds(), [0, 1, 0, 1], p) == 0
        assert p.read_text().splitlines() == ["id,text,true_label,predicted_label,score"]

    def test_fp_before_fn(self, tmp_path):
        p = tmp_path / "r.csv"
        retro_export(self._ds(), [0, 0, 1, 1], p, scores=[0.1, 0.2, 0.7, 0.9])
        rows = list(csv.reader(io.StringIO(p.read_text())))[1:]
        assert [(r[1], r[2], r[3]) for r in rows] == [("ok", "0", "1"), ("bad", "1", "0")]

    def test_length_mismatch(self, tmp_path):
        with pytest.raises(ValueError):
            retro_export(self._ds(), [0, 1], tmp_path / "r.csv")


@pytest.fixture(scope="module")
def entries(bundled):
    return tuning_sweep(bundled, "DT", seed=5, repeats=2)


class TestSweep:
    def test_eight_rows(self, entries):
        assert len(entries) == 8
        assert len({e.config for e in entries}) == 8
        assert [e.rank for e in entries] == list(range(1, 9))

    def test_profanity_ranks_top(self, entries):
        assert all(e.config.count_profanity for e in entries[:4])
        assert all(e.significant for e in entries[:4])

    def test_keyword_removal_not_significant(self, entries):
        kw = next(e for e in entries if e.config == PreprocessConfig(remove_keywords=True))
        assert not kw.significant

    def test_ranking_order(self, entries):
        keys = [(e.report.means.f1_1, e.report.means.accuracy) for e in entries]
        assert keys == sorted(keys, reverse=True)
