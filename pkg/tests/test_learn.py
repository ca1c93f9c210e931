"""Learners, evaluation, and the benchmark harness."""

import numpy as np
import pytest

from palpress.core import DimensionError, PressureLevel
from palpress.features import Scheme, SchemeSet
from palpress.learn import (
    BASELINE_ACCURACY,
    AnnConfig,
    BenchmarkTable,
    BenchRow,
    Dataset,
    GbtConfig,
    ModelKind,
    SingleClassError,
    SvmConfig,
    TrainedModel,
    ann_init,
    ann_loss_and_grads,
    argmax_highest,
    benchmark,
    combine_datasets,
    evaluate,
    report_from_predictions,
    standardize_fit,
    train_model,
)

from helpers import gaussian_blobs, make_dataset, single_sample, xor_blobs


def _accuracy(model, samples):
    return evaluate(model, samples).accuracy


class TestStandardization:
    def test_zero_mean_unit_std(self):
        gen = np.random.default_rng(2)
        x = gen.normal(5.0, 3.0, size=(200, 4))
        stz = standardize_fit(x)
        z = stz.apply(x)
        assert np.allclose(z.mean(axis=0), 0.0, atol=1e-12)
        assert np.allclose(z.std(axis=0), 1.0, atol=1e-12)

    def test_constant_column_passthrough(self):
        x = np.column_stack([np.full(10, 7.0), np.arange(10.0)])
        z = standardize_fit(x).apply(x)
        assert np.allclose(z[:, 0], 0.0)

    def test_parameters_come_from_train_only(self):
        """Test rows must be scaled by train statistics, not their own."""
        x_train = np.zeros((20, 1))
        x_train[:10] = 2.0
        stz = standardize_fit(x_train)
        x_test = np.array([[100.0]])
        assert stz.apply(x_test)[0, 0] == pytest.approx((100.0 - 1.0) / 1.0)

    def test_dict_roundtrip(self):
        stz = standardize_fit(np.arange(12.0).reshape(6, 2))
        from palpress.learn import Standardization

        again = Standardization.from_dict(stz.to_dict())
        assert np.array_equal(again.mean, stz.mean)
        assert np.array_equal(again.std, stz.std)

    def test_dimension_mismatch(self):
        stz = standardize_fit(np.zeros((4, 3)))
        with pytest.raises(DimensionError):
            stz.apply(np.zeros((2, 5)))


class TestArgmaxHighest:
    def test_plain_argmax(self):
        scores = np.array([[0.1, 0.9, 0.2], [0.8, 0.0, 0.1]])
        assert argmax_highest(scores).tolist() == [1, 0]

    def test_ties_resolve_upward(self):
        scores = np.array([[0.5, 0.5, 0.1], [0.3, 0.4, 0.4], [0.2, 0.2, 0.2]])
        assert argmax_highest(scores).tolist() == [1, 2, 2]


class TestReg:
    def test_recovers_clean_ordinal_structure(self):
        # feature = class index + small noise: a line fits exactly
        gen = np.random.default_rng(8)
        y = np.repeat([0, 1, 2], 30)
        x = (y + gen.normal(0.0, 0.05, size=y.size)).reshape(-1, 1)
        data = make_dataset(x, y, x[:9], y[:9])
        model = train_model(ModelKind.REG, data)
        assert _accuracy(model, data.train) == 1.0

    def test_blobs(self):
        x, y = gaussian_blobs(seed=11)
        xt, yt = gaussian_blobs(seed=12)
        model = train_model(ModelKind.REG, make_dataset(x, y, xt, yt))
        assert _accuracy(model, make_dataset(x, y, xt, yt).test) >= 0.9

    def test_predictions_are_valid_levels(self):
        x, y = gaussian_blobs(n_per_class=15, seed=31)
        data = make_dataset(x, y, x, y)
        model = train_model(ModelKind.REG, data)
        preds = model.predict(np.array([[1e6, -1e6], [-1e6, 1e6]]))
        assert set(preds.tolist()) <= {0, 1, 2}


class TestSvm:
    def test_separable_blobs(self):
        x, y = gaussian_blobs(seed=11)
        xt, yt = gaussian_blobs(seed=12)
        data = make_dataset(x, y, xt, yt)
        model = train_model(ModelKind.SVM, data)
        assert _accuracy(model, data.test) >= 0.95

    def test_training_order_does_not_matter(self):
        """Full-batch updates make the fit invariant to sample order."""
        x, y = gaussian_blobs(n_per_class=25, seed=3)
        probe = np.random.default_rng(0).normal(size=(40, 2)) * 4
        data = make_dataset(x, y, x[:3], y[:3])
        model_a = train_model(ModelKind.SVM, data)
        perm = np.random.default_rng(9).permutation(len(y))
        data_b = make_dataset(x[perm], y[perm], x[:3], y[:3])
        model_b = train_model(ModelKind.SVM, data_b)
        assert np.allclose(model_a.decision_scores(probe), model_b.decision_scores(probe), atol=1e-9)

    def test_duplicating_every_sample_changes_nothing(self):
        """The hinge term averages over samples, so duplication is a no-op."""
        x, y = gaussian_blobs(n_per_class=20, seed=5)
        probe = np.random.default_rng(1).normal(size=(40, 2)) * 4
        single = make_dataset(x, y, x[:3], y[:3])
        doubled = make_dataset(np.vstack([x, x]), np.concatenate([y, y]), x[:3], y[:3])
        model_a = train_model(ModelKind.SVM, single)
        model_b = train_model(ModelKind.SVM, doubled)
        assert np.allclose(model_a.decision_scores(probe), model_b.decision_scores(probe), atol=1e-6)

    def test_single_class_rejected(self):
        x = np.random.default_rng(0).normal(size=(20, 2))
        y = np.zeros(20, dtype=int)
        with pytest.raises(SingleClassError):
            train_model(ModelKind.SVM, make_dataset(x, y, x[:2], y[:2]))

    def test_config_epochs_respected(self):
        x, y = gaussian_blobs(n_per_class=10, seed=7)
        data = make_dataset(x, y, x[:3], y[:3])
        fast = train_model(ModelKind.SVM, data, config=SvmConfig(epochs=1))
        slow = train_model(ModelKind.SVM, data, config=SvmConfig(epochs=100))
        probe = np.array([[0.0, 0.0]])
        assert not np.allclose(fast.decision_scores(probe), slow.decision_scores(probe))


class TestGbt:
    def test_loss_curve_non_increasing(self):
        x, y = gaussian_blobs(n_per_class=25, seed=13)
        data = make_dataset(x, y, x[:3], y[:3])
        model = train_model(ModelKind.GBT, data)
        curve = model.params["loss_curve"]
        assert len(curve) == 101
        diffs = np.diff(curve)
        assert (diffs <= 1e-12).all()

    def test_xor_beats_linear(self):
        """Axis-aligned splits carve the interleaved classes a line cannot."""
        x, y = xor_blobs(seed=23)
        data = make_dataset(x, y, x[:5], y[:5])
        gbt = train_model(ModelKind.GBT, data)
        svm = train_model(ModelKind.SVM, data)
        assert _accuracy(gbt, data.train) >= 0.95
        assert _accuracy(svm, data.train) <= 0.75

    def test_zero_rounds_predicts_prior(self):
        x = np.random.default_rng(4).normal(size=(30, 2))
        y = np.array([0] * 20 + [1] * 6 + [2] * 4)
        data = make_dataset(x, y, x[:3], y[:3])
        model = train_model(ModelKind.GBT, data, config=GbtConfig(rounds=0))
        assert (model.predict(x) == 0).all()

    def test_blobs(self):
        x, y = gaussian_blobs(seed=17)
        xt, yt = gaussian_blobs(seed=18)
        data = make_dataset(x, y, xt, yt)
        model = train_model(ModelKind.GBT, data)
        assert _accuracy(model, data.test) >= 0.9


class TestAnn:
    def test_gradients_match_finite_differences(self):
        gen = np.random.default_rng(21)
        xs = gen.normal(size=(10, 5))
        y = gen.integers(0, 3, size=10)
        params = ann_init(dim=5, hidden=7, seed=2)
        _, grads = ann_loss_and_grads(params, xs, y)
        eps = 1e-5
        worst = 0.0
        for key in ("w1", "b1", "w2", "b2"):
            flat = params[key].ravel()
            grad_flat = grads[key].ravel()
            for idx in range(flat.size):
                orig = flat[idx]
                flat[idx] = orig + eps
                up, _ = ann_loss_and_grads(params, xs, y)
                flat[idx] = orig - eps
                down, _ = ann_loss_and_grads(params, xs, y)
                flat[idx] = orig
                fd = (up - down) / (2 * eps)
                denom = max(1e-8, abs(fd) + abs(grad_flat[idx]))
                worst = max(worst, abs(fd - grad_flat[idx]) / denom)
        assert worst < 1e-4

    def test_loss_decreases(self):
        x, y = gaussian_blobs(n_per_class=20, seed=19)
        data = make_dataset(x, y, x[:3], y[:3])
        model = train_model(ModelKind.ANN, data, config=AnnConfig(epochs=120, seed=1))
        curve = model.params["loss_curve"]
        assert curve[-1] < curve[0]

    def test_blobs(self):
        x, y = gaussian_blobs(seed=11)
        xt, yt = gaussian_blobs(seed=12)
        data = make_dataset(x, y, xt, yt)
        model = train_model(ModelKind.ANN, data)
        assert _accuracy(model, data.test) >= 0.9

    def test_seed_changes_init(self):
        a = ann_init(dim=4, hidden=6, seed=0)
        b = ann_init(dim=4, hidden=6, seed=1)
        assert not np.allclose(a["w1"], b["w1"])
        assert np.allclose(a["w1"], ann_init(dim=4, hidden=6, seed=0)["w1"])


class TestTrainedModelSerialization:
    @pytest.mark.parametrize("kind", list(ModelKind))
    def test_roundtrip_preserves_predictions(self, kind):
        x, y = gaussian_blobs(n_per_class=15, seed=14)
        data = make_dataset(x, y, x[:6], y[:6])
        model = train_model(kind, data, seed=3)
        again = TrainedModel.from_dict(model.to_dict())
        probe = np.random.default_rng(6).normal(size=(25, 2)) * 3
        assert np.array_equal(model.predict(probe), again.predict(probe))
        assert again.kind is kind


class TestEvaluate:
    def test_perfect_and_zero(self):
        y = np.array([0, 1, 2, 1])
        perfect = report_from_predictions(y, y)
        assert perfect.accuracy == 1.0
        assert np.trace(perfect.confusion) == 4
        wrong = report_from_predictions(y, (y + 1) % 3)
        assert wrong.accuracy == 0.0

    def test_confusion_layout(self):
        report = report_from_predictions(np.array([0, 0, 2]), np.array([1, 0, 2]))
        assert report.confusion[0, 1] == 1  # truth low predicted medium
        assert report.confusion[0, 0] == 1
        assert report.confusion[2, 2] == 1

    def test_uniform_guessing_sits_at_chance(self):
        gen = np.random.default_rng(25)
        y = gen.integers(0, 3, size=10000)
        pred = gen.integers(0, 3, size=10000)
        report = report_from_predictions(y, pred)
        assert report.accuracy == pytest.approx(BASELINE_ACCURACY, abs=0.02)

    def test_dimension_guard(self):
        x, y = gaussian_blobs(n_per_class=10, seed=1)
        data = make_dataset(x, y, x[:2], y[:2])
        model = train_model(ModelKind.REG, data)
        bad = [single_sample(np.zeros(5), 0)]
        with pytest.raises(DimensionError):
            evaluate(model, bad)


class TestDataset:
    def test_train_test_overlap_rejected(self):
        s = single_sample([1.0], 0, clip_id="c", frame_index=0)
        with pytest.raises(ValueError):
            Dataset(train=(s,), test=(s,), scheme=s.features.scheme)

    def test_scheme_mismatch_rejected(self):
        s = single_sample([1.0], 0)
        with pytest.raises(ValueError):
            Dataset(train=(s,), test=(), scheme=SchemeSet.of(Scheme.LAW))

    def test_mixed_dims_rejected(self):
        a = single_sample([1.0], 0, frame_index=0)
        b = single_sample([1.0, 2.0], 1, frame_index=1)
        with pytest.raises(DimensionError):
            Dataset(train=(a, b), test=(), scheme=a.features.scheme)


class TestCombineDatasets:
    def _aligned_singles(self):
        gen = np.random.default_rng(33)
        y = np.array([0, 1, 2, 0, 1, 2])
        singles = {}
        for scheme, dim in ((Scheme.ENTROPY, 1), (Scheme.SHADOW, 1), (Scheme.LAW, 3)):
            x = gen.normal(size=(6, dim))
            xt = gen.normal(size=(3, dim))
            singles[scheme] = make_dataset(x, y, xt, y[:3], scheme_set=SchemeSet.of(scheme))
        return singles

    def test_dims_add_and_order_is_canonical(self):
        singles = self._aligned_singles()
        combo = combine_datasets(singles, SchemeSet.of(Scheme.LAW, Scheme.ENTROPY))
        assert combo.feature_dim == 4
        ent = singles[Scheme.ENTROPY].train[0].features.values
        law = singles[Scheme.LAW].train[0].features.values
        assert np.array_equal(combo.train[0].features.values, np.concatenate([ent, law]))

    def test_misaligned_rejected(self):
        singles = self._aligned_singles()
        broken = singles[Scheme.SHADOW]
        reordered = Dataset(
            train=tuple(reversed(broken.train)), test=broken.test, scheme=broken.scheme
        )
        singles[Scheme.SHADOW] = reordered
        with pytest.raises(ValueError):
            combine_datasets(singles, SchemeSet.of(Scheme.ENTROPY, Scheme.SHADOW))


class TestBenchmark:
    def _singles(self):
        y = np.repeat([0, 1, 2], 12)
        yt = np.repeat([0, 1, 2], 4)
        gen = np.random.default_rng(44)
        singles = {}
        for scheme in Scheme:
            x = gen.normal(size=(36, 2)) + y[:, None] * 3.0
            xt = gen.normal(size=(12, 2)) + yt[:, None] * 3.0
            singles[scheme] = make_dataset(x, y, xt, yt, scheme_set=SchemeSet.of(scheme))
        return singles

    def test_full_grid_row_count(self):
        table = benchmark(self._singles(), seed=0)
        assert len(table.rows) == 10 * 4
        csv = table.to_csv()
        assert csv.splitlines()[0] == "scheme,model,train_acc,test_acc,gap"
        assert len(csv.splitlines()) == 42  # header + 40 rows + baseline
        assert csv.splitlines()[-1].startswith("baseline,chance,0.333333")

    def test_rerun_is_bit_identical(self):
        a = benchmark(self._singles(), seed=9)
        b = benchmark(self._singles(), seed=9)
        assert a.to_csv() == b.to_csv()

    def test_restricted_grid(self):
        table = benchmark(
            self._singles(),
            kinds=(ModelKind.SVM,),
            scheme_sets=(SchemeSet.of(Scheme.LAW), SchemeSet.of(Scheme.LAW, Scheme.LBP)),
            seed=0,
        )
        assert [(r.scheme, r.model) for r in table.rows] == [("Law", "SVM"), ("LawLBP", "SVM")]

    def test_missing_single_is_an_error(self):
        singles = self._singles()
        del singles[Scheme.LBP]
        with pytest.raises(ValueError):
            benchmark(singles, scheme_sets=(SchemeSet.of(Scheme.LBP),), seed=0)

    def test_json_roundtrip(self):
        table = benchmark(
            self._singles(),
            kinds=(ModelKind.REG,),
            scheme_sets=(SchemeSet.of(Scheme.ENTROPY),),
            seed=5,
        )
        again = BenchmarkTable.from_json_dict(table.to_json_dict())
        assert again.to_csv() == table.to_csv()
        assert again.seed == 5

    def test_gap_column(self):
        row = BenchRow(scheme="Law", model="SVM", train_acc=0.9, test_acc=0.7)
        assert row.gap == pytest.approx(0.2)
