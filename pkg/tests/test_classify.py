import numpy as np
import pytest
import scipy.sparse as sp

from pmu_bop.classify import (
    ClassifierKind,
    ClassifierModel,
    Hyperparams,
    confusion_matrix,
    confusion_to_report,
    kfold_evaluate,
    predict,
    stack_features,
    stratified_folds,
    train,
    train_matrix,
)
from pmu_bop.core import EventLabel
from pmu_bop.sax import SaxParams
from pmu_bop.synth import SynthConfig, gen_dataset
from pmu_bop.vectorize import FeatureVector

FD, FAULT, GL, LC, LT, SS = EventLabel.ordered()
KINDS = [ClassifierKind.CENTROID, ClassifierKind.SVM]
FAST = Hyperparams(lam=1e-3, epochs=20)

# default class sizes with 17 scattered errors; rows true, columns predicted.
REFERENCE_CONFUSION = np.array([
    [600, 0, 0, 0, 0, 0],
    [0, 935, 0, 0, 0, 0],
    [0, 0, 114, 0, 1, 0],
    [0, 0, 4, 405, 11, 0],
    [0, 0, 0, 1, 162, 0],
    [0, 0, 0, 0, 0, 120],
])


def fv(values, params=SaxParams(2, 1, 2)):
    values = np.asarray(values, dtype=float)
    nz = np.flatnonzero(values)
    return FeatureVector(indices=nz, values=values[nz], params=params)


def separable_pairs():
    return [(fv([0, 1, 0, 0]), FAULT)] * 20 + [(fv([1, 0, 0, 0]), LC)] * 20


def training_accuracy(model, pairs):
    X = stack_features([f for f, _ in pairs])
    return np.mean([p is lbl for p, (_, lbl) in zip(model.predict(X), pairs)])


# -- training -----------------------------------------------------------------------


@pytest.mark.parametrize("kind", KINDS)
def test_separable_training_accuracy(kind):
    pairs = separable_pairs()
    model = train(pairs, kind, FAST, seed=0)
    assert training_accuracy(model, pairs) == 1.0


@pytest.mark.parametrize("kind", KINDS)
def test_identical_features_different_labels(kind):
    pairs = [(fv([1, 1, 0, 0]), FAULT)] * 10 + [(fv([1, 1, 0, 0]), LC)] * 10 + [(fv([0, 0, 3, 0]), SS)] * 10
    model = train(pairs, kind, FAST, seed=0)
    assert training_accuracy(model, pairs[:20]) <= 0.5
    assert all(predict(model, f) is SS for f, _ in pairs[20:])


@pytest.mark.parametrize("kind", KINDS)
def test_training_is_deterministic(kind):
    rng = np.random.default_rng(0)
    X = sp.csr_matrix(rng.random((60, 8)) * (rng.random((60, 8)) > 0.4))
    y = rng.integers(0, 6, 60)
    a = train_matrix(X, y, kind, FAST, seed=3)
    b = train_matrix(X, y, kind, FAST, seed=3)
    assert a.coef.tobytes() == b.coef.tobytes()
    assert a.intercept.tobytes() == b.intercept.tobytes()
    if kind is ClassifierKind.SVM:
        c = train_matrix(X, y, kind, FAST, seed=4)
        assert c.coef.tobytes() != a.coef.tobytes()


def test_single_class_rejected():
    with pytest.raises(ValueError):
        train([(fv([1, 0, 0, 0]), FAULT)] * 5)


def test_mixed_params_rejected():
    with pytest.raises(ValueError):
        train([(fv([1, 0, 0, 0]), FAULT), (fv([0, 1, 0, 0, 0, 0], SaxParams(3, 1, 2)), LC)])


def test_svm_objective_history():
    rng = np.random.default_rng(1)
    X = sp.csr_matrix(rng.random((80, 10)))
    y = rng.integers(0, 6, 80)
    model = train_matrix(X, y, "svm", Hyperparams(lam=1e-2, epochs=15), seed=0)
    hist = np.array(model.objective_history)
    assert hist.shape == (15, 6)
    assert np.all(np.isfinite(hist))
    best = np.minimum.accumulate(hist, axis=0)
    assert np.all(np.diff(best, axis=0) <= 0)


def test_svm_at_least_centroid_on_separable():
    rng = np.random.default_rng(2)
    centers = rng.random((6, 12)) * 4
    y = np.repeat(np.arange(6), 15)
    X = sp.csr_matrix(np.abs(centers[y] + 0.05 * rng.standard_normal((90, 12))))
    acc = {k: np.mean(train_matrix(X, y, k, FAST, 0).predict_indices(X) == y) for k in KINDS}
    assert acc[ClassifierKind.SVM] >= acc[ClassifierKind.CENTROID]
    assert acc[ClassifierKind.SVM] == 1.0


# -- prediction ------------------------------------------------------------------------


def manual_model(kind, coef, intercept=None, present=None):
    coef = np.asarray(coef, dtype=float)
    d = coef.shape[1]
    return ClassifierModel(
        kind=kind,
        feature_dim=d,
        columns=np.arange(d),
        mean=np.zeros(d),
        scale=np.ones(d),
        coef=coef,
        intercept=np.zeros(6) if intercept is None else np.asarray(intercept, dtype=float),
        present=np.ones(6, bool) if present is None else np.asarray(present),
    )


def test_predict_class_mean_is_that_class():
    rng = np.random.default_rng(4)
    X = rng.random((30, 5))
    y = np.repeat([1, 3, 5], 10)
    model = train_matrix(sp.csr_matrix(X), y, "centroid")
    for k in (1, 3, 5):
        assert model.predict_indices(X[y == k].mean(axis=0, keepdims=True))[0] == k


def test_predict_nearer_centroid():
    coef = np.zeros((6, 2))
    coef[FAULT.index] = [1, 0]
    coef[LC.index] = [0, 2]
    present = np.zeros(6, bool)
    present[[FAULT.index, LC.index]] = True
    model = manual_model("centroid", coef, present=present)
    assert model.predict(np.zeros((1, 2))) == [FAULT]


def test_tie_goes_to_canonical_order():
    model = manual_model("svm", np.zeros((6, 3)))
    assert model.predict(np.ones((1, 3))) == [FD]
    model = manual_model("svm", np.zeros((6, 3)), intercept=[0, 1, 0, 1, 0, 0])
    assert model.predict(np.ones((1, 3))) == [FAULT]


def test_dimension_mismatch():
    model = train(separable_pairs(), "centroid")
    with pytest.raises(ValueError):
        model.predict(np.zeros((1, 7)))


@pytest.mark.parametrize("factor", [0.25, 2.0, 1024.0, 3.7, 0.013])
def test_centroid_scale_invariance(factor):
    rng = np.random.default_rng(6)
    centers = rng.random((6, 10)) * 3
    y = np.repeat(np.arange(6), 12)
    X = np.abs(centers[y] + 0.4 * rng.standard_normal((72, 10)))
    test = np.abs(centers[rng.integers(0, 6, 40)] + 0.4 * rng.standard_normal((40, 10)))
    base = train_matrix(sp.csr_matrix(X), y, "centroid").predict_indices(test)
    scaled = train_matrix(sp.csr_matrix(X * factor), y, "centroid").predict_indices(test * factor)
    assert np.array_equal(base, scaled)


# -- persistence ---------------------------------------------------------------------


@pytest.mark.parametrize("kind", KINDS)
def test_model_json_roundtrip(kind, tmp_path, fault_record):
    from pmu_bop.vectorize import extract_features

    d = gen_dataset(SynthConfig(seed=1).scaled(0.02))
    p = SaxParams()
    pairs = [(extract_features(r, p), r.label) for r in d]
    model = train(pairs, kind, FAST, seed=0)
    path = tmp_path / "m.json"
    model.save(path)
    back = ClassifierModel.load(path)
    X = stack_features([f for f, _ in pairs])
    np.testing.assert_array_equal(back.decision_function(X), model.decision_function(X))
    obj = model.to_json()
    assert obj["kind"] == kind.value
    assert set(obj["classes"]) == {lbl.value for lbl in EventLabel}
    assert all(k[:2] in ("i:", "v:") for k in obj["standardization"]["mean"])


# -- metrics --------------------------------------------------------------------------


def test_report_identity():
    r = confusion_to_report(np.diag([10] * 6))
    assert r.accuracy == 1.0
    assert r.recall.tolist() == [1.0] * 6
    assert r.ppv.tolist() == [1.0] * 6


def test_report_one_error():
    cm = np.diag([20, 20, 15, 15, 15, 15])
    cm[2, 2] -= 1
    cm[2, 4] += 1
    r = confusion_to_report(cm)
    assert r.total == 100
    assert r.accuracy == pytest.approx(0.99)


def test_report_empty_rows_and_columns():
    cm = np.zeros((6, 6), int)
    cm[0, 0] = 3
    cm[1, 0] = 1
    r = confusion_to_report(cm)
    assert r.recall.tolist() == [1.0, 0.0, 0, 0, 0, 0]
    assert r.ppv.tolist() == [0.75, 0.0, 0, 0, 0, 0]


def test_report_reference_matrix():
    r = confusion_to_report(REFERENCE_CONFUSION)
    assert r.total == 2353
    assert round(100 * r.accuracy, 1) == 99.3
    assert np.round(100 * r.recall).tolist() == [100, 100, 99, 96, 99, 100]
    assert REFERENCE_CONFUSION[3, 2] / 420 == pytest.approx(0.01, abs=0.005)
    assert REFERENCE_CONFUSION[3, 4] / 420 == pytest.approx(0.03, abs=0.005)


def test_report_rejects_bad_shape():
    with pytest.raises(ValueError):
        confusion_to_report(np.eye(5))


def test_confusion_matrix_counts():
    cm = confusion_matrix([0, 0, 1, 5], [0, 1, 1, 5])
    assert cm.sum() == 4
    assert cm[0, 1] == 1 and cm[5, 5] == 1


def test_report_table_and_csv():
    r = confusion_to_report(REFERENCE_CONFUSION)
    table = r.format_table()
    assert "accuracy: 99.3%" in table
    assert table.count("\n") >= 9
    lines = r.to_csv().splitlines()
    assert lines[0].startswith("true_label,false_data,fault")
    assert len(lines) == 8


# -- cross-validation ----------------------------------------------------------------


def test_fold_sizes():
    y = np.repeat(np.arange(6), [40, 20, 10, 10, 10, 10])
    folds = stratified_folds(y, 10, seed=0)
    assert np.bincount(folds).tolist() == [10] * 10
    for k in range(6):
        counts = np.bincount(folds[y == k], minlength=10)
        assert counts.max() - counts.min() <= 1


def test_fold_sizes_uneven():
    folds = stratified_folds(np.zeros(23, int), 10, seed=1)
    sizes = np.bincount(folds)
    assert sizes.max() - sizes.min() <= 1 and sizes.sum() == 23


def test_fold_errors():
    with pytest.raises(ValueError):
        stratified_folds(np.zeros(10, int), 1, 0)
    with pytest.raises(ValueError):
        stratified_folds(np.zeros(5, int), 6, 0)


@pytest.fixture(scope="module")
def two_class_dataset():
    return gen_dataset(SynthConfig(seed=4, counts={FAULT: 25, FD: 25}))


@pytest.mark.parametrize("kind", KINDS)
def test_kfold_two_separable_classes(two_class_dataset, kind):
    r = kfold_evaluate(two_class_dataset, SaxParams(), kind, FAST, k=5, seed=0)
    assert r.accuracy == 1.0
    assert r.total == 50


def test_kfold_deterministic(two_class_dataset):
    a = kfold_evaluate(two_class_dataset, SaxParams(), "svm", FAST, k=5, seed=2)
    b = kfold_evaluate(two_class_dataset, SaxParams(), "svm", FAST, k=5, seed=2)
    assert a == b


def test_kfold_errors(two_class_dataset):
    with pytest.raises(ValueError):
        kfold_evaluate(two_class_dataset, SaxParams(), "svm", FAST, k=51)
    one = gen_dataset(SynthConfig(counts={FAULT: 12}))
    with pytest.raises(ValueError):
        kfold_evaluate(one, SaxParams(), "svm", FAST, k=3)
