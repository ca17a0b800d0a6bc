"""Command-line entry point.

Subcommands:
    gen-data    generate train/eval splits to disk
    train       train a model, writing metrics log + checkpoint
    eval        evaluate a checkpoint (optionally against persistence)
    grad-check  run the finite-difference gradient suite
    verify      run the oracle/invariant verification suite
    ablate      patch-size / upsampler / H1-weight sweeps

Every subcommand accepts ``--config <file>`` plus repeated
``--set key=value`` overrides.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import RunConfig, build_run_config
from .errors import PhyPredError


def _add_common(parser):
    parser.add_argument("--config", default=None, help="config file path")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override a config entry")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phypred",
        description="physics-guided spatiotemporal prediction workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-data", help="generate dataset splits")
    _add_common(p)

    p = sub.add_parser("train", help="train a model")
    _add_common(p)
    p.add_argument("--data-dir", default=None,
                   help="load splits from this directory instead of generating")

    p = sub.add_parser("eval", help="evaluate a checkpoint")
    _add_common(p)
    p.add_argument("--checkpoint", default=None,
                   help="checkpoint path (default: <out_dir>/model.ckpt)")
    p.add_argument("--data-dir", default=None,
                   help="load the eval split from this directory")
    p.add_argument("--persistence", action="store_true",
                   help="also report the persistence baseline")

    p = sub.add_parser("grad-check", help="finite-difference gradient suite")
    _add_common(p)

    p = sub.add_parser("verify", help="run the verification suite")
    _add_common(p)
    p.add_argument("--full", action="store_true",
                   help="include the slow end-to-end training criteria")

    p = sub.add_parser("ablate", help="patch/upsampler/H1 sweeps")
    _add_common(p)
    p.add_argument("--steps", type=int, default=300,
                   help="training steps per ablation cell")
    return parser


def _config(args) -> RunConfig:
    return build_run_config(args.config, args.overrides)


def cmd_gen_data(args) -> int:
    from .data import save_split
    from .train import generate_dataset

    cfg = _config(args)
    out = Path(cfg.out_dir) / "data"
    train = generate_dataset(cfg, split_seed_offset=0,
                             n_sequences=cfg.data.n_train)
    save_split(out, "train", train)
    evalb = generate_dataset(cfg, split_seed_offset=1,
                             n_sequences=cfg.data.n_eval)
    save_split(out, "eval", evalb)
    print(f"wrote {train.n} train / {evalb.n} eval sequences to {out}")
    return 0


def cmd_train(args) -> int:
    from .data import load_split
    from .train import train_loop

    cfg = _config(args)
    dataset = load_split(args.data_dir, "train") if args.data_dir else None
    result = train_loop(cfg, dataset=dataset)
    print(f"trained {cfg.optim.steps} steps; final loss "
          f"{result.losses[-1] if result.losses else float('nan'):.6f}")
    print(f"checkpoint: {result.checkpoint_path}")
    print(f"metrics log: {result.metrics_path}")
    return 0


def cmd_eval(args) -> int:
    from .data import load_split
    from .evaluate import evaluate_model, evaluate_persistence, format_table, kv_lines
    from .train import generate_dataset, load_model

    cfg = _config(args)
    ckpt = args.checkpoint or str(Path(cfg.out_dir) / "model.ckpt")
    model = load_model(cfg.model, ckpt)
    if args.data_dir:
        batch = load_split(args.data_dir, "eval")
    else:
        batch = generate_dataset(cfg, split_seed_offset=1,
                                 n_sequences=cfg.data.n_eval)
    metrics = ("mse", "mae", "ssim", "nmse") \
        if cfg.data.generator == "navier_stokes" else ("mse", "mae", "ssim")
    reports = [evaluate_model(model, batch, metrics)]
    if args.persistence:
        reports.append(evaluate_persistence(batch, metrics))
    print(format_table(reports))
    print(kv_lines(reports))
    return 0


def cmd_grad_check(args) -> int:
    from .verification import criterion_gradient_suite

    result = criterion_gradient_suite()
    print(result.detail)
    print(result.line())
    return 0 if result.passed else 1


def cmd_verify(args) -> int:
    from .verification import run_all

    cfg = _config(args)
    results = run_all(include_slow=args.full, workdir=Path(cfg.out_dir))
    for r in results:
        print(r.line())
    n_fail = sum(not r.passed for r in results)
    print(f"{len(results) - n_fail}/{len(results)} criteria passed")
    return 0 if n_fail == 0 else 1


def cmd_ablate(args) -> int:
    from .ablation import run_ablations

    cfg = _config(args)
    table = run_ablations(cfg, steps=args.steps)
    print(table)
    return 0


_COMMANDS = {
    "gen-data": cmd_gen_data,
    "train": cmd_train,
    "eval": cmd_eval,
    "grad-check": cmd_grad_check,
    "verify": cmd_verify,
    "ablate": cmd_ablate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except PhyPredError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
