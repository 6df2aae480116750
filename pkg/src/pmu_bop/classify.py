"""Classifiers, k-fold cross-validation and confusion-matrix reports.

Two classifiers work on sparse TF-DF feature matrices:

``centroid``
    nearest class mean (Euclidean) in standardized feature space.
``svm``
    one-vs-rest linear SVMs trained by stochastic subgradient descent on the
    L2-regularized hinge loss with step size ``1 / (lam * t)``.

Features are standardized with training statistics (zero mean, unit
population variance; constant columns are only centred). Centring would
destroy sparsity, so it is never applied to the data matrix: both models fold
the mean into their decision values.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .core import Dataset, EventLabel
from .sax import SaxParams
from .vectorize import FeatureVector, extract_features, feature_key_to_position

__all__ = [
    "ClassifierKind",
    "Hyperparams",
    "ClassifierModel",
    "EvalReport",
    "stack_features",
    "train",
    "train_matrix",
    "predict",
    "confusion_matrix",
    "confusion_to_report",
    "stratified_folds",
    "kfold_evaluate",
    "kfold_evaluate_features",
    "featurize_dataset",
]

LABELS = EventLabel.ordered()
N_CLASSES = len(LABELS)


class ClassifierKind(str, enum.Enum):
    CENTROID = "centroid"
    SVM = "svm"


@dataclass(frozen=True)
class Hyperparams:
    """Regularization strength and epoch count for the SVM (ignored by ``centroid``)."""

    lam: float = 1e-4
    epochs: int = 50

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lam must be positive")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")


def stack_features(features: Sequence[FeatureVector]) -> sp.csr_matrix:
    """Stack feature vectors into a CSR matrix of shape ``(n, 2 * alpha**gamma)``."""
    if not features:
        raise ValueError("no feature vectors given")
    dim = features[0].dim
    indptr = np.zeros(len(features) + 1, dtype=np.int64)
    for i, f in enumerate(features):
        if f.dim != dim:
            raise ValueError(f"feature {i} has dimension {f.dim}, expected {dim}")
        indptr[i + 1] = indptr[i] + f.indices.size
    indices = np.concatenate([f.indices for f in features])
    data = np.concatenate([f.values for f in features])
    return sp.csr_matrix((data, indices, indptr), shape=(len(features), dim))


def _label_indices(labels: Iterable[EventLabel]) -> np.ndarray:
    return np.array([lbl.index for lbl in labels], dtype=np.int64)


@dataclass(eq=False)
class ClassifierModel:
    """A trained classifier over the training columns of a feature space.

    Only ``columns`` (positions that were non-zero somewhere in the training
    set) carry parameters; every other feature has zero weight. ``coef`` holds
    one row per label in canonical order, in standardized coordinates:
    weight vectors for ``svm``, centroids for ``centroid``. ``present`` marks
    labels seen during training; an absent label can never be predicted by
    the centroid model.
    """

    kind: ClassifierKind
    feature_dim: int
    columns: np.ndarray
    mean: np.ndarray
    scale: np.ndarray
    coef: np.ndarray
    intercept: np.ndarray
    present: np.ndarray
    hyperparams: Hyperparams = field(default_factory=Hyperparams)
    params: SaxParams | None = None
    objective_history: list[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        self.kind = ClassifierKind(self.kind)
        if self.coef.shape != (N_CLASSES, self.columns.size):
            raise ValueError("coef must have one row per label and one column per training column")
        if not (np.all(np.isfinite(self.coef)) and np.all(np.isfinite(self.intercept))):
            raise ValueError("model parameters must be finite")

    def decision_function(self, X) -> np.ndarray:
        """Per-label scores, shape ``(n, 6)``; the prediction is the first argmax."""
        X = sp.csr_matrix(X, dtype=np.float64)
        if X.shape[1] != self.feature_dim:
            raise ValueError(f"feature dimension {X.shape[1]} does not match model ({self.feature_dim})")
        Z = X[:, self.columns] @ sp.diags(1.0 / self.scale)
        m = self.mean / self.scale
        # u = z - m; score = u . coef_k + intercept_k
        scores = np.asarray(Z @ self.coef.T) - (self.coef @ m)[None, :]
        if self.kind is ClassifierKind.CENTROID:
            # -||u - c||^2 up to the per-sample constant ||u||^2
            scores = 2.0 * scores - np.sum(self.coef * self.coef, axis=1)[None, :]
            scores[:, ~self.present] = -np.inf
        else:
            scores = scores + self.intercept[None, :]
        return scores

    def predict_indices(self, X) -> np.ndarray:
        return np.argmax(self.decision_function(X), axis=1)

    def predict(self, X) -> list[EventLabel]:
        return [LABELS[i] for i in self.predict_indices(X)]

    # -- persistence -------------------------------------------------------

    def _keys(self) -> list[str]:
        if self.params is None:
            return [str(int(c)) for c in self.columns]
        fv = FeatureVector(np.empty(0, np.int64), np.empty(0), self.params)
        return [fv.key(int(c)) for c in self.columns]

    def to_json(self) -> dict:
        keys = self._keys()

        def sparse(row):
            return {k: float(v) for k, v in zip(keys, row) if v != 0.0}

        return {
            "kind": self.kind.value,
            "hyperparams": {"lam": self.hyperparams.lam, "epochs": self.hyperparams.epochs},
            "sax": None
            if self.params is None
            else {"alpha": self.params.alpha, "gamma": self.params.gamma, "omega": self.params.omega},
            "feature_dim": self.feature_dim,
            "standardization": {
                "mean": {k: float(v) for k, v in zip(keys, self.mean)},
                "scale": {k: float(v) for k, v in zip(keys, self.scale)},
            },
            "classes": {
                lbl.value: {
                    "present": bool(self.present[i]),
                    ("centroid" if self.kind is ClassifierKind.CENTROID else "weights"): sparse(self.coef[i]),
                    "intercept": float(self.intercept[i]),
                }
                for i, lbl in enumerate(LABELS)
            },
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ClassifierModel":
        kind = ClassifierKind(obj["kind"])
        params = SaxParams(**obj["sax"]) if obj.get("sax") else None
        mean_map = obj["standardization"]["mean"]
        scale_map = obj["standardization"]["scale"]
        keys = list(mean_map)
        if params is None:
            pos = np.array([int(k) for k in keys], dtype=np.int64)
        else:
            pos = np.array([feature_key_to_position(k, params) for k in keys], dtype=np.int64)
        order = np.argsort(pos, kind="stable")
        keys = [keys[i] for i in order]
        where = {k: j for j, k in enumerate(keys)}
        coef = np.zeros((N_CLASSES, len(keys)))
        intercept = np.zeros(N_CLASSES)
        present = np.zeros(N_CLASSES, dtype=bool)
        field_name = "centroid" if kind is ClassifierKind.CENTROID else "weights"
        for i, lbl in enumerate(LABELS):
            entry = obj["classes"][lbl.value]
            for k, v in entry[field_name].items():
                coef[i, where[k]] = v
            intercept[i] = entry["intercept"]
            present[i] = entry["present"]
        hp = obj.get("hyperparams") or {}
        return cls(
            kind=kind,
            feature_dim=int(obj["feature_dim"]),
            columns=pos[order],
            mean=np.array([mean_map[k] for k in keys], dtype=np.float64),
            scale=np.array([scale_map[k] for k in keys], dtype=np.float64),
            coef=coef,
            intercept=intercept,
            present=present,
            hyperparams=Hyperparams(**hp),
            params=params,
        )

    def save(self, path: str | os.PathLike) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json(), fh, allow_nan=False)

    @classmethod
    def load(cls, path: str | os.PathLike) -> "ClassifierModel":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


def _standardize_stats(X: sp.csr_matrix):
    columns = np.unique(X.indices)
    Xc = X[:, columns].tocsr()
    n = X.shape[0]
    mean = np.asarray(Xc.sum(axis=0)).ravel() / n
    # two-pass variance; implicit zeros contribute mean**2 each
    csc = Xc.tocsc()
    nnz = np.diff(csc.indptr)
    dev = csc.data - np.repeat(mean, nnz)
    ss = np.add.reduceat(dev * dev, csc.indptr[:-1]) if dev.size else np.zeros(columns.size)
    ss = np.where(nnz > 0, ss, 0.0) + (n - nnz) * mean * mean
    std = np.sqrt(ss / n)
    scale = np.where(std > 0.0, std, 1.0)
    return columns, Xc, mean, scale


def _pegasos(Z: sp.csr_matrix, m: np.ndarray, Y: np.ndarray, lam: float, epochs: int,
             rng: np.random.Generator):
    """One-vs-rest hinge-loss SGD on ``u_i = z_i - m`` plus a regularized bias coordinate.

    Weights are kept as ``w_k = s * V_k - a_k * m`` so that the shrink step is a
    scalar update and each sample touches only its non-zeros. Returns the
    per-class iterate with the lowest end-of-epoch objective and the history of
    objectives.
    """
    n, D = Z.shape
    K = Y.shape[1]
    V = np.zeros((K, D + 1))
    a = np.zeros(K)
    Vm = np.zeros(K)
    s = 1.0
    mm = float(m @ m)
    zm = np.asarray(Z @ m).ravel()
    indptr, indices, data = Z.indptr, Z.indices, Z.data

    best_obj = np.full(K, np.inf)
    best_W = np.zeros((K, D + 1))
    history = []
    t = 0
    for _ in range(epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (lam * t)
            lo, hi = indptr[i], indptr[i + 1]
            idx = indices[lo:hi]
            val = data[lo:hi]
            y = Y[i]
            margin = s * (V[:, idx] @ val + V[:, D] - Vm) - a * (zm[i] - mm)
            viol = y * margin < 1.0
            rho = 1.0 - eta * lam
            if rho <= 0.0:
                V[:] = 0.0
                a[:] = 0.0
                Vm[:] = 0.0
                s = 1.0
            else:
                s *= rho
                a *= rho
            if viol.any():
                step = eta * y[viol]
                coef = step / s
                rows = np.flatnonzero(viol)
                V[np.ix_(rows, idx)] += coef[:, None] * val[None, :]
                V[rows, D] += coef
                Vm[rows] += coef * zm[i]
                a[rows] += step

        W = s * V
        W[:, :D] -= a[:, None] * m[None, :]
        margins = np.asarray(Z @ W[:, :D].T) - (W[:, :D] @ m)[None, :] + W[:, D][None, :]
        obj = 0.5 * lam * np.sum(W * W, axis=1) + np.mean(np.maximum(0.0, 1.0 - Y * margins), axis=0)
        history.append(obj)
        better = obj < best_obj
        best_obj = np.where(better, obj, best_obj)
        best_W[better] = W[better]
    return best_W, history


def train_matrix(
    X,
    y: Sequence[EventLabel] | np.ndarray,
    kind: ClassifierKind | str = ClassifierKind.SVM,
    hyperparams: Hyperparams | None = None,
    seed: int = 0,
    params: SaxParams | None = None,
) -> ClassifierModel:
    """Train on a feature matrix `X` (rows are records) and labels `y`.

    `y` holds :class:`EventLabel` values or canonical label indices.
    """
    kind = ClassifierKind(kind)
    hp = hyperparams or Hyperparams()
    X = sp.csr_matrix(X, dtype=np.float64)
    yi = np.asarray(y) if isinstance(y, np.ndarray) else _label_indices(y)
    if yi.shape[0] != X.shape[0]:
        raise ValueError(f"{X.shape[0]} feature rows but {yi.shape[0]} labels")
    if np.unique(yi).size < 2:
        raise ValueError("training data must contain at least two classes")

    columns, Xc, mean, scale = _standardize_stats(X)
    Z = (Xc @ sp.diags(1.0 / scale)).tocsr()
    Z.sort_indices()
    m = mean / scale
    present = np.bincount(yi, minlength=N_CLASSES) > 0

    history: list[np.ndarray] = []
    if kind is ClassifierKind.CENTROID:
        coef = np.zeros((N_CLASSES, columns.size))
        for k in np.flatnonzero(present):
            coef[k] = np.asarray(Z[yi == k].mean(axis=0)).ravel() - m
        intercept = np.zeros(N_CLASSES)
    else:
        Y = np.where(yi[:, None] == np.arange(N_CLASSES)[None, :], 1.0, -1.0)
        rng = np.random.default_rng(seed)
        W, history = _pegasos(Z, m, Y, hp.lam, hp.epochs, rng)
        coef, intercept = W[:, :-1], W[:, -1].copy()

    return ClassifierModel(
        kind=kind,
        feature_dim=X.shape[1],
        columns=columns,
        mean=mean,
        scale=scale,
        coef=np.ascontiguousarray(coef),
        intercept=intercept,
        present=present,
        hyperparams=hp,
        params=params,
        objective_history=history,
    )


def train(
    features: Sequence[tuple[FeatureVector, EventLabel]],
    kind: ClassifierKind | str = ClassifierKind.SVM,
    hyperparams: Hyperparams | None = None,
    seed: int = 0,
) -> ClassifierModel:
    """Train a classifier on ``(feature_vector, label)`` pairs."""
    if not features:
        raise ValueError("no training data")
    fvs = [f for f, _ in features]
    params = fvs[0].params
    if any(f.params != params for f in fvs):
        raise ValueError("feature vectors were extracted with different SAX parameters")
    return train_matrix(stack_features(fvs), [lbl for _, lbl in features], kind, hyperparams, seed, params)


def predict(model: ClassifierModel, f: FeatureVector) -> EventLabel:
    """Label of a single feature vector."""
    return model.predict(stack_features([f]))[0]


# -- evaluation ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EvalReport:
    """Accuracy, 6x6 confusion matrix (rows true, columns predicted) and per-class rates."""

    accuracy: float
    confusion: np.ndarray
    recall: np.ndarray
    ppv: np.ndarray

    @property
    def total(self) -> int:
        return int(self.confusion.sum())

    def __eq__(self, other):
        if not isinstance(other, EvalReport):
            return NotImplemented
        return (
            self.accuracy == other.accuracy
            and np.array_equal(self.confusion, other.confusion)
            and np.array_equal(self.recall, other.recall)
            and np.array_equal(self.ppv, other.ppv)
        )

    __hash__ = None

    def format_table(self) -> str:
        names = [lbl.title for lbl in LABELS]
        width = max(len(n) for n in names) + 2
        cell = max(8, len(str(int(self.confusion.max(initial=0)))) + 2)
        out = [f"accuracy: {100.0 * self.accuracy:.1f}% ({self.total} records)", ""]
        out.append("true \\ predicted".ljust(width) + "".join(n.split()[0][:cell - 1].rjust(cell) for n in names)
                   + "recall".rjust(9))
        for i, name in enumerate(names):
            row = "".join(str(int(v)).rjust(cell) for v in self.confusion[i])
            out.append(name.ljust(width) + row + f"{100.0 * self.recall[i]:8.1f}%")
        out.append("ppv".ljust(width) + "".join(f"{100.0 * v:.1f}%".rjust(cell) for v in self.ppv))
        return "\n".join(out) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["true_label"] + [lbl.value for lbl in LABELS] + ["recall", "ppv"])
        for i, lbl in enumerate(LABELS):
            w.writerow([lbl.value] + [int(v) for v in self.confusion[i]]
                       + [f"{self.recall[i]:.6f}", f"{self.ppv[i]:.6f}"])
        w.writerow(["accuracy", f"{self.accuracy:.6f}"])
        return buf.getvalue()


def confusion_matrix(true_idx, pred_idx) -> np.ndarray:
    """6x6 count matrix, rows true label, columns predicted, canonical label order."""
    cm = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    np.add.at(cm, (np.asarray(true_idx, dtype=np.int64), np.asarray(pred_idx, dtype=np.int64)), 1)
    return cm


def confusion_to_report(confusion) -> EvalReport:
    """Recall (row-normalized diagonal), positive predictive value (column-normalized) and accuracy.

    Empty rows or columns give a rate of 0.
    """
    cm = np.asarray(confusion)
    if cm.shape != (N_CLASSES, N_CLASSES):
        raise ValueError(f"confusion matrix must be {N_CLASSES}x{N_CLASSES}, got {cm.shape}")
    if np.any(cm < 0):
        raise ValueError("confusion counts must be non-negative")
    cm = cm.astype(np.int64)
    diag = np.diag(cm).astype(np.float64)
    rows = cm.sum(axis=1)
    cols = cm.sum(axis=0)
    recall = np.divide(diag, rows, out=np.zeros(N_CLASSES), where=rows > 0)
    ppv = np.divide(diag, cols, out=np.zeros(N_CLASSES), where=cols > 0)
    total = cm.sum()
    accuracy = float(diag.sum() / total) if total else 0.0
    return EvalReport(accuracy=accuracy, confusion=cm, recall=recall, ppv=ppv)


def stratified_folds(label_idx, k: int, seed: int) -> np.ndarray:
    """Fold number for each record.

    Records are shuffled, grouped by label (keeping the shuffled order inside
    each group) and dealt round-robin, so fold sizes differ by at most one and
    every class is spread as evenly as its count allows.
    """
    y = np.asarray(label_idx)
    n = y.size
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of records ({n})")
    perm = np.random.default_rng(seed).permutation(n)
    order = perm[np.argsort(y[perm], kind="stable")]
    folds = np.empty(n, dtype=np.int64)
    folds[order] = np.arange(n) % k
    return folds


def kfold_evaluate_features(
    X,
    y,
    kind: ClassifierKind | str = ClassifierKind.SVM,
    hyperparams: Hyperparams | None = None,
    k: int = 10,
    seed: int = 0,
) -> EvalReport:
    """k-fold cross-validation on a precomputed feature matrix."""
    X = sp.csr_matrix(X)
    yi = np.asarray(y) if isinstance(y, np.ndarray) else _label_indices(y)
    if np.unique(yi).size < 2:
        raise ValueError("cross-validation needs at least two classes")
    folds = stratified_folds(yi, k, seed)
    pred = np.empty_like(yi)
    for f in range(k):
        test = folds == f
        fold_seed = int(np.random.SeedSequence([int(seed), f]).generate_state(1)[0])
        model = train_matrix(X[~test], yi[~test], kind, hyperparams, fold_seed)
        pred[test] = model.predict_indices(X[test])
    return confusion_to_report(confusion_matrix(yi, pred))


def featurize_dataset(d: Dataset, params: SaxParams) -> tuple[sp.csr_matrix, np.ndarray]:
    """Feature matrix and label indices for every record of `d`."""
    X = stack_features([extract_features(r, params) for r in d])
    return X, _label_indices(d.labels)


def kfold_evaluate(
    d: Dataset,
    params: SaxParams,
    kind: ClassifierKind | str = ClassifierKind.SVM,
    hyperparams: Hyperparams | None = None,
    k: int = 10,
    seed: int = 0,
) -> EvalReport:
    """Featurize `d` with `params` and cross-validate with `k` stratified folds."""
    if k > len(d):
        raise ValueError(f"k={k} exceeds the number of records ({len(d)})")
    X, y = featurize_dataset(d, params)
    return kfold_evaluate_features(X, y, kind, hyperparams, k, seed)
