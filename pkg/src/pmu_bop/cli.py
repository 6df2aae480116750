"""Command-line front end: ``pmu-bop <subcommand> ...``.

Exit codes: 0 success, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

from .classify import (
    ClassifierKind,
    ClassifierModel,
    Hyperparams,
    featurize_dataset,
    kfold_evaluate,
    kfold_evaluate_features,
    stack_features,
    train_matrix,
)
from .core import DatasetError, EventLabel, dumps_dataset, load_dataset
from .sax import SaxParams, sax_words
from .synth import SynthConfig, add_awgn_dataset, gen_dataset
from .vectorize import extract_features

SWEEP_HEADER = ["alpha", "gamma", "window", "classifier", "accuracy_pct"]


class UsageError(Exception):
    pass


def _atomic_write(path: str, text: str) -> None:
    """Write `text` to `path` via a temporary file so failures never leave partial output."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _parse_snr(text: str) -> float | None:
    if text.strip().lower() in ("none", "inf", "off"):
        return None
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'none', got {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError("snr must be finite (use 'none' for no noise)")
    return value


def _parse_counts(text: str) -> dict[EventLabel, int]:
    counts = {lbl: 0 for lbl in EventLabel}
    for item in text.split(","):
        if not item.strip():
            continue
        name, sep, value = item.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"expected label=count, got {item!r}")
        try:
            label = EventLabel.parse(name)
            n = int(value)
        except (DatasetError, ValueError) as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
        if n < 0:
            raise argparse.ArgumentTypeError(f"count for {name} must be >= 0")
        counts[label] = n
    return counts


def _int_grid(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("grid must not be empty")
    return values


def _kinds(text: str) -> list[ClassifierKind]:
    try:
        kinds = [ClassifierKind(v.strip()) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"classifier must be one of: centroid, svm (got {text!r})") from None
    if not kinds:
        raise argparse.ArgumentTypeError("no classifier given")
    return kinds


def _sax_params(args) -> SaxParams:
    try:
        return SaxParams(alpha=args.alpha, gamma=args.gamma, omega=args.window)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _hyperparams(args) -> Hyperparams:
    try:
        return Hyperparams(lam=args.lam, epochs=args.epochs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _load(path: str):
    d = load_dataset(path)
    if len(d) == 0:
        raise DatasetError(f"{path}: dataset is empty")
    return d


def _check_window(d, params: SaxParams) -> None:
    n = d[0].n_samples
    if params.omega > n:
        raise UsageError(f"--window {params.omega} exceeds the record length {n}")


# -- subcommands ---------------------------------------------------------------


def cmd_synth(args) -> int:
    cfg = SynthConfig(seed=args.seed, snr_db=args.snr_db)
    if args.counts is not None:
        cfg = cfg.replace(counts=args.counts)
    if args.scale is not None:
        if args.scale < 0:
            raise UsageError("--scale must be >= 0")
        cfg = cfg.scaled(args.scale)
    d = gen_dataset(cfg)
    _atomic_write(args.out, dumps_dataset(d))
    print(f"wrote {len(d)} records to {args.out}", file=sys.stderr)
    return 0


def cmd_encode(args) -> int:
    params = _sax_params(args)
    d = _load(args.input)
    if not 0 <= args.index < len(d):
        raise UsageError(f"--index {args.index} out of range (dataset has {len(d)} records)")
    _check_window(d, params)
    rec = d[args.index]
    lines = [" ".join(sax_words(ch, params)) for ch in list(rec.voltages) + list(rec.currents)]
    text = "\n".join(lines) + "\n"
    if args.out:
        _atomic_write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_featurize(args) -> int:
    params = _sax_params(args)
    d = _load(args.input)
    _check_window(d, params)
    lines = []
    for rec in d:
        f = extract_features(rec, params)
        lines.append(json.dumps({"id": rec.id, "label": rec.label.value, "features": f.to_dict()},
                                allow_nan=False, separators=(",", ":")))
    _atomic_write(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_train(args) -> int:
    params = _sax_params(args)
    hp = _hyperparams(args)
    d = _load(args.input)
    _check_window(d, params)
    if len(args.classifier) != 1:
        raise UsageError("train takes a single --classifier")
    X, y = featurize_dataset(d, params)
    model = train_matrix(X, y, args.classifier[0], hp, args.seed, params)
    _atomic_write(args.out, json.dumps(model.to_json(), allow_nan=False))
    return 0


def cmd_predict(args) -> int:
    model = ClassifierModel.load(args.model)
    if model.params is None:
        raise DatasetError(f"{args.model}: model carries no SAX parameters")
    d = _load(args.input)
    _check_window(d, model.params)
    X = stack_features([extract_features(r, model.params) for r in d])
    pred = model.predict(X)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "label", "predicted"])
    for rec, p in zip(d, pred):
        w.writerow([rec.id, rec.label.value, p.value])
    if args.out:
        _atomic_write(args.out, buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return 0


def cmd_evaluate(args) -> int:
    params = _sax_params(args)
    hp = _hyperparams(args)
    if args.folds < 2:
        raise UsageError(f"--folds must be >= 2, got {args.folds}")
    if len(args.classifier) != 1:
        raise UsageError("evaluate takes a single --classifier")
    d = _load(args.input)
    _check_window(d, params)
    if args.folds > len(d):
        raise UsageError(f"--folds {args.folds} exceeds the number of records ({len(d)})")
    if args.snr_db is not None:
        d = add_awgn_dataset(d, args.snr_db, args.noise_seed)
    report = kfold_evaluate(d, params, args.classifier[0], hp, args.folds, args.seed)
    header = (
        f"classifier={args.classifier[0].value} alpha={params.alpha} gamma={params.gamma} "
        f"window={params.omega} folds={args.folds} seed={args.seed}\n"
    )
    sys.stdout.write(header + report.format_table())
    if args.csv:
        _atomic_write(args.csv, report.to_csv())
    return 0


def cmd_sweep(args) -> int:
    hp = _hyperparams(args)
    if args.folds < 2:
        raise UsageError(f"--folds must be >= 2, got {args.folds}")
    for a in args.alpha_grid:
        if not 2 <= a <= 26:
            raise UsageError(f"alpha {a} outside [2, 26]")
    d = _load(args.input)
    if args.folds > len(d):
        raise UsageError(f"--folds {args.folds} exceeds the number of records ({len(d)})")
    if args.snr_db is not None:
        d = add_awgn_dataset(d, args.snr_db, args.noise_seed)
    n = d[0].n_samples

    rows = []
    for alpha in args.alpha_grid:
        for gamma in args.gamma_grid:
            for window in args.window_grid:
                reason = None
                if gamma < 1 or gamma > window:
                    reason = f"gamma {gamma} must be in [1, window]"
                elif window < 2:
                    reason = "window must be >= 2"
                elif window > n:
                    reason = f"window exceeds record length {n}"
                if reason:
                    print(f"warning: skipping alpha={alpha} gamma={gamma} window={window}: {reason}",
                          file=sys.stderr)
                    continue
                params = SaxParams(alpha, gamma, window)
                X, y = featurize_dataset(d, params)
                for kind in args.classifier:
                    report = kfold_evaluate_features(X, y, kind, hp, args.folds, args.seed)
                    rows.append([alpha, gamma, window, kind.value, f"{100.0 * report.accuracy:.1f}"])

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    w.writerows(rows)
    if args.out:
        _atomic_write(args.out, buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return 0


# -- parser --------------------------------------------------------------------


def _add_sax(p) -> None:
    g = p.add_argument_group("SAX parameters")
    g.add_argument("--alpha", type=int, default=4, help="alphabet size")
    g.add_argument("--gamma", type=int, default=4, help="word size (PAA segments)")
    g.add_argument("--window", type=int, default=25, help="sliding window length")


def _add_classifier(p, multi: bool = False) -> None:
    g = p.add_argument_group("classifier")
    g.add_argument("--classifier", type=_kinds, default=[ClassifierKind.SVM],
                   metavar="{centroid,svm}" + (",..." if multi else ""),
                   help="classifier kind" + (" (comma-separated list)" if multi else ""))
    g.add_argument("--lam", type=float, default=Hyperparams.lam, help="SVM L2 regularization")
    g.add_argument("--epochs", type=int, default=Hyperparams.epochs, help="SVM training epochs")
    g.add_argument("--seed", type=int, default=0, help="random seed")


def _add_noise(p) -> None:
    p.add_argument("--snr-db", type=_parse_snr, default=None,
                   help="add white Gaussian noise at this SNR before evaluating ('none' for no noise)")
    p.add_argument("--noise-seed", type=int, default=1, help="seed for the added noise")


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(
        prog="pmu-bop",
        description="Classify multivariate PMU event windows with SAX bag-of-patterns and TF-DF features.",
        formatter_class=fmt,
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("synth", help="generate a synthetic labelled dataset", formatter_class=fmt)
    p.add_argument("--out", required=True, help="output JSON-Lines dataset")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("--counts", type=_parse_counts, default=None,
                   help="per-class counts, e.g. fault=935,false_data=600 (unlisted classes get 0; "
                        "default: 935/115/163/420/120/600)")
    p.add_argument("--scale", type=float, default=None, help="multiply every class count by this factor")
    p.add_argument("--snr-db", type=_parse_snr, default=None, help="noise SNR in dB, or 'none'")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("encode", help="print the SAX words of one record, one channel per line",
                       formatter_class=fmt)
    p.add_argument("--input", required=True, help="JSON-Lines dataset")
    p.add_argument("--index", type=int, default=0, help="record index (0-based)")
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    _add_sax(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("featurize", help="write TF-DF feature vectors as JSON Lines", formatter_class=fmt)
    p.add_argument("--input", required=True, help="JSON-Lines dataset")
    p.add_argument("--out", required=True, help="output JSON-Lines feature file")
    _add_sax(p)
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("train", help="train a classifier and save it as JSON", formatter_class=fmt)
    p.add_argument("--input", required=True, help="JSON-Lines dataset")
    p.add_argument("--out", required=True, help="output model JSON")
    _add_sax(p)
    _add_classifier(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="label records with a trained model", formatter_class=fmt)
    p.add_argument("--model", required=True, help="model JSON from 'train'")
    p.add_argument("--input", required=True, help="JSON-Lines dataset")
    p.add_argument("--out", default=None, help="output CSV (default: stdout)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="k-fold cross-validation report", formatter_class=fmt)
    p.add_argument("--input", required=True, help="JSON-Lines dataset")
    p.add_argument("--folds", type=int, default=10, help="number of folds")
    p.add_argument("--csv", default=None, help="also write the report as CSV")
    _add_sax(p)
    _add_classifier(p)
    _add_noise(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="cross-validated accuracy over a SAX parameter grid",
                       formatter_class=fmt)
    p.add_argument("--input", required=True, help="JSON-Lines dataset")
    p.add_argument("--alpha-grid", type=_int_grid, default=[3, 4, 5], help="alphabet sizes")
    p.add_argument("--gamma-grid", type=_int_grid, default=[3, 4, 5], help="word sizes")
    p.add_argument("--window-grid", type=_int_grid, default=[15, 20, 25, 30], help="window lengths")
    p.add_argument("--folds", type=int, default=10, help="number of folds")
    p.add_argument("--out", default=None, help="output CSV (default: stdout)")
    _add_classifier(p, multi=True)
    _add_noise(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.exit(2, f"{parser.prog} {args.command}: error: {exc}\n")
    except (DatasetError, OSError, ValueError) as exc:
        print(f"{parser.prog} {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
