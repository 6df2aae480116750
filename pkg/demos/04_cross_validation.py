"""
Classifying events with cross-validation
========================================

Features from every record are stacked into a sparse matrix and two linear
classifiers are scored with stratified 10-fold cross-validation. A smaller
dataset (a tenth of the default class sizes) keeps the run to a few seconds.
"""

from pmu_bop import (
    Hyperparams,
    SaxParams,
    SynthConfig,
    featurize_dataset,
    gen_dataset,
    kfold_evaluate_features,
)

d = gen_dataset(SynthConfig(seed=0).scaled(0.1))
print(len(d), "records:", {lbl.value: n for lbl, n in d.label_counts().items()})

X, y = featurize_dataset(d, SaxParams(alpha=4, gamma=4, omega=25))
print("feature matrix", X.shape, f"with {X.nnz / X.shape[0]:.0f} nonzeros per record")

for kind in ("centroid", "svm"):
    report = kfold_evaluate_features(X, y, kind, Hyperparams(), k=10, seed=0)
    print(f"\n== {kind} ==")
    print(report.format_table())
