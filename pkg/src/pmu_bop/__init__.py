"""SAX bag-of-patterns features and classifiers for multivariate PMU event windows."""

from .classify import (
    ClassifierKind,
    ClassifierModel,
    EvalReport,
    Hyperparams,
    confusion_to_report,
    featurize_dataset,
    kfold_evaluate,
    kfold_evaluate_features,
    predict,
    train,
    train_matrix,
)
from .core import Dataset, DatasetError, EventLabel, EventRecord, load_dataset, save_dataset
from .sax import SaxParams, breakpoints, paa, sax_words, symbolize, znormalize
from .synth import SynthConfig, add_awgn, add_awgn_dataset, gen_dataset, gen_event, gen_false_data
from .vectorize import (
    BopMatrix,
    FeatureVector,
    bop_matrix,
    bow,
    extract_features,
    feature_vector_block,
    weight_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "ClassifierKind",
    "ClassifierModel",
    "EvalReport",
    "Hyperparams",
    "confusion_to_report",
    "featurize_dataset",
    "kfold_evaluate",
    "kfold_evaluate_features",
    "predict",
    "train",
    "train_matrix",
    "Dataset",
    "DatasetError",
    "EventLabel",
    "EventRecord",
    "load_dataset",
    "save_dataset",
    "SaxParams",
    "breakpoints",
    "paa",
    "sax_words",
    "symbolize",
    "znormalize",
    "SynthConfig",
    "add_awgn",
    "add_awgn_dataset",
    "gen_dataset",
    "gen_event",
    "gen_false_data",
    "BopMatrix",
    "FeatureVector",
    "bop_matrix",
    "bow",
    "extract_features",
    "feature_vector_block",
    "weight_matrix",
]
