"""Metrics, ROC/AUC, the repeated-run harness, and the model ablation table.

The ablation runs every baseline on the 17 node features and the neural
model on all four feature modes, which mirrors the benchmark layout the
package reports (one row per model and feature mode, mean and std over
repeated seeded runs against a fixed test set).
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from . import baselines, neural
from .errors import EmptyInput, OneClassOnly
from .features import FeatureSet, mode_matrix

NEURAL_MODELS = {
    "deepfork4": neural.Architecture.FOUR_LAYER,
    "deepfork6": neural.Architecture.SIX_LAYER,
}

MODEL_NAMES = tuple(baselines.CLASSIFIERS) + tuple(NEURAL_MODELS)

# ablation row order: baselines on node features, then the neural modes
ABLATION_BASELINES = ("random", "knn", "nb", "dtree", "rforest", "xtrees",
                      "linsvm")
ABLATION_NEURAL_MODES = (FeatureSet.NODE, FeatureSet.NODE_NO_WATCH,
                         FeatureSet.TOPOLOGICAL, FeatureSet.COMBINED)


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def n(self):
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricsRow:
    accuracy: float
    prec_pos: float
    prec_neg: float
    rec_pos: float
    rec_neg: float
    f1_pos: float
    f1_neg: float
    auc: float

    def as_array(self):
        return np.array([getattr(self, f.name) for f in fields(self)])

    @classmethod
    def from_array(cls, values):
        return cls(*(float(v) for v in values))


METRIC_FIELDS = tuple(f.name for f in fields(MetricsRow))


@dataclass(frozen=True)
class RocCurve:
    """Points as (threshold, fpr, tpr), thresholds descending from inf."""

    points: tuple


def confusion(labels, predictions):
    y = np.asarray(labels, dtype=np.int64)
    p = np.asarray(predictions, dtype=np.int64)
    if y.shape != p.shape:
        raise ValueError(f"labels {y.shape} vs predictions {p.shape}")
    return ConfusionMatrix(
        tp=int(np.sum((y == 1) & (p == 1))),
        fp=int(np.sum((y == 0) & (p == 1))),
        fn=int(np.sum((y == 1) & (p == 0))),
        tn=int(np.sum((y == 0) & (p == 0))),
    )


def _ratio(num, den):
    return num / den if den > 0 else 0.0


def _f1(p, r):
    return 2.0 * p * r / (p + r) if p + r > 0 else 0.0


def metrics(cm, probs, labels):
    """Scalar metric row; per-class precision/recall/F1 plus AUC."""
    if cm.n == 0:
        raise EmptyInput("cannot compute metrics over zero samples")
    prec_pos = _ratio(cm.tp, cm.tp + cm.fp)
    prec_neg = _ratio(cm.tn, cm.tn + cm.fn)
    rec_pos = _ratio(cm.tp, cm.tp + cm.fn)
    rec_neg = _ratio(cm.tn, cm.tn + cm.fp)
    _, auc = roc_auc(probs, labels)
    return MetricsRow(
        accuracy=_ratio(cm.tp + cm.tn, cm.n),
        prec_pos=prec_pos, prec_neg=prec_neg,
        rec_pos=rec_pos, rec_neg=rec_neg,
        f1_pos=_f1(prec_pos, rec_pos), f1_neg=_f1(prec_neg, rec_neg),
        auc=auc,
    )


def roc_auc(probs, labels):
    """ROC curve plus trapezoidal AUC.

    Thresholds are the unique scores in descending order with a leading
    +inf sentinel, so the curve starts at (0,0) and ends at (1,1); a point
    at threshold t counts scores >= t as positive predictions.
    """
    p = np.asarray(probs, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise OneClassOnly(f"AUC undefined with {n_pos} positives and "
                           f"{n_neg} negatives")
    order = np.argsort(-p, kind="stable")
    ps = p[order]
    ys = y[order]
    cum_tp = np.cumsum(ys == 1)
    cum_fp = np.cumsum(ys == 0)
    last = np.nonzero(np.diff(ps, append=-np.inf))[0]  # last index per score
    tpr = np.concatenate([[0.0], cum_tp[last] / n_pos])
    fpr = np.concatenate([[0.0], cum_fp[last] / n_neg])
    thresholds = np.concatenate([[np.inf], ps[last]])
    auc = float(np.trapezoid(tpr, fpr))
    points = tuple((float(t), float(f), float(r))
                   for t, f, r in zip(thresholds, fpr, tpr))
    return RocCurve(points), auc


def mann_whitney_auc(probs, labels):
    """P(score_pos > score_neg) + 0.5 P(tie), via midranks."""
    p = np.asarray(probs, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise OneClassOnly(f"AUC undefined with {n_pos} positives and "
                           f"{n_neg} negatives")
    order = np.argsort(p, kind="stable")
    ranks = np.empty(len(p), dtype=np.float64)
    sorted_p = p[order]
    i = 0
    while i < len(p):
        j = i
        while j + 1 < len(p) and sorted_p[j + 1] == sorted_p[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0  # midrank, 1-based
        i = j + 1
    r_pos = ranks[y == 1].sum()
    return float((r_pos - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def fit_model(name, x_train, y_train, seed, x_val=None, y_val=None,
              params=None, config=None):
    """Train one model by name; returns (fitted model, history or None).

    Neural names take an optional TrainConfig (preset defaults otherwise);
    baseline names accept constructor overrides via params.
    """
    params = params or {}
    if name in NEURAL_MODELS:
        arch = NEURAL_MODELS[name]
        if config is None:
            preset = neural.PRESET_CONFIG[arch]
            config = neural.TrainConfig(
                epochs=preset.epochs, batch_size=preset.batch_size,
                optimizer=preset.optimizer, learning_rate=preset.learning_rate,
                seed=seed)
        net = neural.init_network(x_train.shape[1], arch, seed=seed)
        net, history = neural.train(net, x_train, y_train, config,
                                    x_val=x_val, y_val=y_val)
        return FittedNetwork(net), history
    if name not in baselines.CLASSIFIERS:
        raise ValueError(f"unknown model {name!r}")
    model = baselines.CLASSIFIERS[name](**params)
    model.fit(x_train, y_train, seed=seed)
    return model, None


class FittedNetwork:
    """Adapter giving a trained network the classifier predict interface."""

    KIND = "deepfork"

    def __init__(self, net):
        self.net = net

    def predict_proba(self, x):
        return neural.predict(self.net, x)[1]

    def predict(self, x):
        return neural.predict(self.net, x)[0]

    def to_state(self):
        return self.net.to_state()

    @classmethod
    def from_state(cls, state):
        return cls(neural.Network.from_state(state))


def evaluate_model(model, x_test, y_test):
    probs = model.predict_proba(x_test)
    preds = (probs >= 0.5).astype(np.int64)
    return metrics(confusion(y_test, preds), probs, y_test)


def run_trials(name, x_train, y_train, x_val, y_val, x_test, y_test,
               n_runs=30, base_seed=0, params=None, config=None):
    """Repeat fit+evaluate with seeds base_seed..base_seed+n_runs-1.

    The data splits stay fixed; only seeded model randomness varies, so
    deterministic models produce zero-variance rows. Returns
    (mean MetricsRow, std MetricsRow, per-run rows); std uses ddof=0.
    """
    if n_runs < 1:
        raise ValueError(f"n_runs must be >= 1, got {n_runs}")
    rows = []
    for i in range(n_runs):
        model, _ = fit_model(name, x_train, y_train, base_seed + i,
                             x_val=x_val, y_val=y_val, params=params,
                             config=config)
        rows.append(evaluate_model(model, x_test, y_test))
    stacked = np.stack([r.as_array() for r in rows])
    mean = MetricsRow.from_array(stacked.mean(axis=0))
    std = MetricsRow.from_array(stacked.std(axis=0, ddof=0))
    return mean, std, rows


def ablation_suite(train, val, test, n_runs=30, base_seed=0,
                   neural_name="deepfork4", baseline_params=None):
    """Benchmark table over (model, feature_mode) keys.

    train/val/test are (combined 29-column matrix, labels) pairs. Baselines
    see the node features; the neural model runs once per feature mode.
    Returns an ordered dict key -> (mean, std, rows).
    """
    (xc_train, y_train), (xc_val, y_val), (xc_test, y_test) = train, val, test
    baseline_params = baseline_params or {}
    results = {}
    node = FeatureSet.NODE
    for name in ABLATION_BASELINES:
        results[(name, node.value)] = run_trials(
            name, mode_matrix(xc_train, node), y_train,
            mode_matrix(xc_val, node), y_val,
            mode_matrix(xc_test, node), y_test,
            n_runs=n_runs, base_seed=base_seed,
            params=baseline_params.get(name))
    for mode in ABLATION_NEURAL_MODES:
        results[(neural_name, mode.value)] = run_trials(
            neural_name, mode_matrix(xc_train, mode), y_train,
            mode_matrix(xc_val, mode), y_val,
            mode_matrix(xc_test, mode), y_test,
            n_runs=n_runs, base_seed=base_seed)
    return results


def write_metrics_csv(results, path):
    """results: dict (model, mode) -> (mean, std, rows) or (mean, std)."""
    import csv
    header = (["model", "feature_mode"] + list(METRIC_FIELDS)
              + [f"std_{f}" for f in METRIC_FIELDS])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for (model, mode), entry in results.items():
            mean, std = entry[0], entry[1]
            row = [model, mode]
            row += [repr(float(v)) for v in mean.as_array()]
            row += [repr(float(v)) for v in std.as_array()]
            writer.writerow(row)


def write_roc_csv(curve, path):
    import csv
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["threshold", "fpr", "tpr"])
        for t, f, r in curve.points:
            writer.writerow([repr(t), repr(f), repr(r)])


_SVG_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
               "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
               "#aec7e8")


def roc_overlay_svg(curves, path):
    """Self-contained SVG overlaying named ROC curves; pure vector paths."""
    width, height, margin = 640, 480, 60
    span_x = width - 2 * margin
    span_y = height - 2 * margin

    def sx(v):
        return margin + v * span_x

    def sy(v):
        return height - margin - v * span_y

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{sx(0):.1f}" y1="{sy(0):.1f}" x2="{sx(1):.1f}" '
        f'y2="{sy(0):.1f}" stroke="black"/>',
        f'<line x1="{sx(0):.1f}" y1="{sy(0):.1f}" x2="{sx(0):.1f}" '
        f'y2="{sy(1):.1f}" stroke="black"/>',
        f'<line x1="{sx(0):.1f}" y1="{sy(0):.1f}" x2="{sx(1):.1f}" '
        f'y2="{sy(1):.1f}" stroke="#999999" stroke-dasharray="4 4"/>',
        f'<text x="{width / 2:.1f}" y="{height - margin / 3:.1f}" '
        f'font-family="monospace" font-size="14" text-anchor="middle">'
        f'false positive rate</text>',
        f'<text x="{margin / 3:.1f}" y="{height / 2:.1f}" '
        f'font-family="monospace" font-size="14" text-anchor="middle" '
        f'transform="rotate(-90 {margin / 3:.1f} {height / 2:.1f})">'
        f'true positive rate</text>',
    ]
    for i, (name, curve) in enumerate(curves.items()):
        color = _SVG_COLORS[i % len(_SVG_COLORS)]
        coords = " ".join(f"{sx(f):.2f},{sy(r):.2f}"
                          for _, f, r in curve.points)
        parts.append(f'<polyline points="{coords}" fill="none" '
                     f'stroke="{color}" stroke-width="1.5"/>')
        ly = margin + 16 * i
        parts.append(f'<line x1="{width - margin - 150}" y1="{ly}" '
                     f'x2="{width - margin - 130}" y2="{ly}" '
                     f'stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{width - margin - 124}" y="{ly + 4}" '
                     f'font-family="monospace" font-size="12">{name}</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")
