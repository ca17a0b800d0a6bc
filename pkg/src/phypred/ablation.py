"""One-factor-at-a-time sweeps: patch size, decoder upsampler, H1 weight.

Each cell trains a fresh model on the same data and reports eval metrics;
the table ends with the observed ordering per axis (no winner is assumed,
the ordering is whatever the run produced).
"""

from __future__ import annotations

import dataclasses

from .config import RunConfig
from .evaluate import evaluate_model
from .train import generate_dataset, train_loop

PATCH_SIZES = (2, 4, 8)
H1_WEIGHTS = ("default", 0.0)


def _cell(cfg: RunConfig, train_data, eval_data) -> dict:
    result = train_loop(cfg, dataset=train_data, write_outputs=False)
    report = evaluate_model(result.model, eval_data,
                            metrics=("mse", "mae", "ssim"))
    return report.aggregate


def _fmt_rows(title: str, rows: list) -> list:
    lines = [title, f"{'variant':>16}  {'mse':>10}  {'mae':>10}  {'ssim':>10}"]
    for name, agg in rows:
        lines.append(f"{name:>16}  {agg['mse']:>10.6f}  {agg['mae']:>10.6f}  "
                     f"{agg['ssim']:>10.6f}")
    by_mse = sorted(rows, key=lambda r: r[1]["mse"])
    ordering = " < ".join(str(name) for name, _ in by_mse)
    lines.append(f"ordering by mse (best first): {ordering}")
    lines.append("")
    return lines


def run_ablations(cfg: RunConfig, steps: int = 300) -> str:
    base = dataclasses.replace(cfg, optim=dataclasses.replace(cfg.optim,
                                                              steps=steps))
    train_data = generate_dataset(base, split_seed_offset=0,
                                  n_sequences=base.data.n_train)
    eval_data = generate_dataset(base, split_seed_offset=1,
                                 n_sequences=base.data.n_eval)
    lines = [f"ablations: generator={base.data.generator} "
             f"frames={base.data.h}x{base.data.w} steps={steps}", ""]

    rows = []
    for p in PATCH_SIZES:
        cell = dataclasses.replace(
            base, model=dataclasses.replace(base.model, patch_size=p))
        rows.append((f"patch={p}", _cell(cell, train_data, eval_data)))
    lines += _fmt_rows("patch size sweep", rows)

    rows = []
    for up in ("transposed_conv", "bilinear"):
        cell = dataclasses.replace(
            base, model=dataclasses.replace(base.model, upsampler=up))
        rows.append((up, _cell(cell, train_data, eval_data)))
    lines += _fmt_rows("decoder upsampler sweep", rows)

    rows = []
    for wh in H1_WEIGHTS:
        lam = base.loss.lambda_h1 if wh == "default" else 0.0
        cell = dataclasses.replace(
            base, loss=dataclasses.replace(base.loss, lambda_h1=lam))
        name = f"h1={lam}" if wh == "default" else "h1=off"
        rows.append((name, _cell(cell, train_data, eval_data)))
    lines += _fmt_rows("H1 weight sweep", rows)

    return "\n".join(lines)
