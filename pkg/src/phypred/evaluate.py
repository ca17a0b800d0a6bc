"""Rollout evaluation: per-lead-time and aggregate metrics, with an optional
persistence yardstick, as a human-readable table plus key=value lines."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .autodiff import no_grad
from .data import SequenceBatch, persistence_baseline
from .metrics import mae_metric, mse_metric, nmse, ssim

DEFAULT_METRICS = ("mse", "mae", "ssim")


@dataclass
class EvalReport:
    label: str
    per_lead: dict = field(default_factory=dict)   # metric -> [horizon] array
    aggregate: dict = field(default_factory=dict)  # metric -> float
    n_sequences: int = 0
    horizon: int = 0


def _metric_frame(name: str, pred, target, data_range: float) -> float:
    if name == "mse":
        return mse_metric(pred, target)
    if name == "mae":
        return mae_metric(pred, target)
    if name == "ssim":
        return float(np.mean([ssim(p, t, data_range=data_range)
                              for p, t in zip(pred, target)]))
    if name == "nmse":
        return nmse(pred, target)
    raise ValueError(f"unknown metric {name!r}")


def score_predictions(preds: np.ndarray, targets: np.ndarray,
                      metrics=DEFAULT_METRICS, data_range: float | None = None,
                      label: str = "model") -> EvalReport:
    """Metrics per lead time plus their mean over the horizon."""
    preds = np.asarray(preds)
    targets = np.asarray(targets)
    if data_range is None:
        spread = float(targets.max() - targets.min())
        data_range = spread if spread > 0 else 1.0
    horizon = targets.shape[1]
    report = EvalReport(label=label, n_sequences=targets.shape[0],
                        horizon=horizon)
    for name in metrics:
        per_lead = np.array([
            _metric_frame(name, preds[:, t], targets[:, t], data_range)
            for t in range(horizon)
        ])
        report.per_lead[name] = per_lead
        report.aggregate[name] = float(per_lead.mean())
    return report


def evaluate_model(model, batch: SequenceBatch, metrics=DEFAULT_METRICS,
                   data_range: float | None = None,
                   batch_size: int = 8) -> EvalReport:
    preds = rollout_predictions(model, batch, batch_size)
    return score_predictions(preds, batch.targets, metrics, data_range, "model")


def rollout_predictions(model, batch: SequenceBatch,
                        batch_size: int = 8) -> np.ndarray:
    chunks = []
    with no_grad():
        for start in range(0, batch.n, batch_size):
            part = batch.inputs[start:start + batch_size]
            chunks.append(model.rollout(part, batch.t_out).data)
    return np.concatenate(chunks, axis=0)


def evaluate_persistence(batch: SequenceBatch, metrics=DEFAULT_METRICS,
                         data_range: float | None = None) -> EvalReport:
    preds = persistence_baseline(batch.inputs, batch.t_out)
    return score_predictions(preds, batch.targets, metrics, data_range,
                             "persistence")


def format_table(reports: list) -> str:
    """Side-by-side per-lead table for one or more reports."""
    lines = []
    for report in reports:
        metrics = list(report.per_lead)
        header = f"[{report.label}]  n={report.n_sequences}"
        lines.append(header)
        lines.append("lead  " + "  ".join(f"{m:>10}" for m in metrics))
        for t in range(report.horizon):
            row = f"{t + 1:>4}  " + "  ".join(
                f"{report.per_lead[m][t]:>10.6f}" for m in metrics)
            lines.append(row)
        lines.append(" agg  " + "  ".join(
            f"{report.aggregate[m]:>10.6f}" for m in metrics))
        lines.append("")
    return "\n".join(lines)


def kv_lines(reports: list) -> str:
    """Machine-readable records, one line per lead plus an aggregate line."""
    lines = []
    for report in reports:
        prefix = f"label={report.label}"
        for t in range(report.horizon):
            vals = " ".join(f"{m}={repr(float(report.per_lead[m][t]))}"
                            for m in report.per_lead)
            lines.append(f"{prefix} lead={t + 1} {vals}")
        vals = " ".join(f"{m}={repr(float(report.aggregate[m]))}"
                        for m in report.aggregate)
        lines.append(f"{prefix} lead=all {vals}")
    return "\n".join(lines)
