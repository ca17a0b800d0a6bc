"""Adam training loop with gradient clipping, deterministic logging,
and manifest-indexed binary checkpoints.

The metrics log is one ``key=value`` record per line per step:

    step=12 total=0.0123 mse=0.0100 h1=0.040 moment=0.0003 grad_norm=0.87

Floats are written with ``repr`` so identical runs produce byte-identical
logs.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .autodiff import Tensor, backward
from .config import RunConfig, dump_run_config
from .data import (
    SequenceBatch,
    gen_advection_diffusion,
    gen_bouncing_blobs,
    gen_navier_stokes,
)
from .data.tensorfile import tensor_from_bytes, tensor_to_bytes
from .errors import CheckpointError, ConfigError, NonFiniteError
from .losses import total_loss
from .model import ModelConfig, PredictionModel
from .moments import moment_loss


class Adam:
    """Adam with bias correction; state keyed by parameter name."""

    def __init__(self, params: dict, lr: float = 1e-3, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.params = dict(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {k: np.zeros_like(p.data) for k, p in self.params.items()}
        self.v = {k: np.zeros_like(p.data) for k, p in self.params.items()}

    def zero_grad(self):
        for p in self.params.values():
            p.zero_grad()

    def step(self):
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        bc1 = 1.0 - b1 ** self.t
        bc2 = 1.0 - b2 ** self.t
        for name, p in self.params.items():
            g = p.grad
            if g is None:
                continue
            m = self.m[name]
            v = self.v[name]
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            p.data = p.data - self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)


def clip_grad_norm(params: dict, max_norm: float) -> float:
    """Scale all gradients so their global L2 norm is at most max_norm."""
    total = 0.0
    for p in params.values():
        if p.grad is not None:
            total += float((p.grad * p.grad).sum())
    norm = float(np.sqrt(total))
    if norm > max_norm and norm > 0.0:
        scale = max_norm / norm
        for p in params.values():
            if p.grad is not None:
                p.grad *= scale
    return norm


# -- checkpoints -----------------------------------------------------------------

_CKPT_MAGIC = "STPCKPT1"


def save_checkpoint(path, arrays: dict) -> None:
    """Manifest (name, shape, byte offset) followed by concatenated records."""
    blobs = []
    manifest = []
    offset = 0
    for name, arr in arrays.items():
        blob = tensor_to_bytes(arr)
        shape = np.asarray(getattr(arr, "data", arr)).shape
        dims = ",".join(map(str, shape)) if shape else "-"
        manifest.append(f"{name} {dims} {offset}")
        blobs.append(blob)
        offset += len(blob)
    header = "\n".join([f"{_CKPT_MAGIC} count={len(blobs)}"] + manifest) + "\n\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        for blob in blobs:
            fh.write(blob)


def load_checkpoint(path) -> dict:
    blob = Path(path).read_bytes()
    head_end = blob.find(b"\n\n")
    if head_end < 0:
        raise CheckpointError(f"{path}: missing manifest terminator")
    lines = blob[:head_end].decode("ascii").splitlines()
    if not lines or not lines[0].startswith(_CKPT_MAGIC):
        raise CheckpointError(f"{path}: bad checkpoint magic")
    count = int(lines[0].split("count=", 1)[1])
    if len(lines) - 1 != count:
        raise CheckpointError(f"{path}: manifest lists {len(lines) - 1} entries, "
                              f"header says {count}")
    base = head_end + 2
    out = {}
    for line in lines[1:]:
        name, dims, offset = line.rsplit(" ", 2)
        arr, _ = tensor_from_bytes(blob, base + int(offset))
        expect = () if dims == "-" else tuple(int(d) for d in dims.split(","))
        if arr.shape != expect:
            raise CheckpointError(f"{path}: tensor {name!r} has shape "
                                  f"{arr.shape}, manifest says {expect}")
        out[name] = arr
    return out


# -- the loop --------------------------------------------------------------------


@dataclass
class TrainResult:
    model: PredictionModel
    log_lines: list
    losses: list
    checkpoint_path: str | None
    metrics_path: str | None


def generate_dataset(cfg: RunConfig, split_seed_offset: int = 0,
                     n_sequences: int | None = None) -> SequenceBatch:
    d = cfg.data
    n = d.n_train if n_sequences is None else n_sequences
    seed = d.seed + split_seed_offset
    if d.generator == "blobs":
        return gen_bouncing_blobs(n, d.t_in, d.t_out, d.h, d.w,
                                  n_blobs=d.n_blobs, seed=seed)
    if d.generator == "advection":
        return gen_advection_diffusion(n, d.t_in, d.t_out, d.h, d.w,
                                       velocity=(d.velocity_x, d.velocity_y),
                                       nu=d.nu, seed=seed)
    if d.generator == "navier_stokes":
        return gen_navier_stokes(n, d.t_in, d.t_out, n=d.h, nu=d.ns_nu,
                                 seed=seed)
    raise ConfigError(f"generator {d.generator!r} cannot produce data")


def _fmt(value: float) -> str:
    return repr(float(value))


def train_loop(cfg: RunConfig, dataset: SequenceBatch | None = None,
               write_outputs: bool = True) -> TrainResult:
    """Train a model per the run config; reproducible given (config, seed)."""
    model = PredictionModel(cfg.model, seed=cfg.seed)
    params = model.named_parameters()
    opt = Adam(params, lr=cfg.optim.lr)
    rng = np.random.default_rng(cfg.seed)

    if not cfg.optim.moment_only:
        if dataset is None:
            if cfg.data.generator == "none":
                raise ConfigError("no dataset given and data.generator=none")
            dataset = generate_dataset(cfg)
        if dataset.inputs.shape[2:] != (cfg.model.frame_channels,
                                        cfg.model.frame_h, cfg.model.frame_w):
            raise ConfigError(
                f"dataset frames {dataset.inputs.shape[2:]} do not match model "
                f"frames {(cfg.model.frame_channels, cfg.model.frame_h, cfg.model.frame_w)}")

    log_lines = []
    losses = []
    for step in range(cfg.optim.steps):
        if cfg.optim.moment_only:
            loss = moment_loss(model.bank)
            breakdown = {"mse": 0.0, "h1": 0.0, "moment": float(loss.data),
                         "total": float(loss.data)}
        else:
            idx = rng.integers(0, dataset.n, size=cfg.optim.batch_size)
            preds = model.rollout(dataset.inputs[idx], cfg.data.t_out)
            loss, breakdown = total_loss(preds, Tensor(dataset.targets[idx]),
                                         model.bank, cfg.loss)
        if not np.isfinite(breakdown["total"]):
            raise NonFiniteError(
                f"non-finite loss at step {step}: {breakdown}")
        backward(loss)
        grad_norm = clip_grad_norm(params, cfg.optim.clip_norm)
        opt.step()
        opt.zero_grad()
        losses.append(breakdown["total"])
        log_lines.append(
            f"step={step} total={_fmt(breakdown['total'])} "
            f"mse={_fmt(breakdown['mse'])} h1={_fmt(breakdown['h1'])} "
            f"moment={_fmt(breakdown['moment'])} grad_norm={_fmt(grad_norm)}")

    ckpt_path = metrics_path = None
    if write_outputs:
        out_dir = Path(cfg.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        metrics_path = str(out_dir / "metrics.log")
        Path(metrics_path).write_text("\n".join(log_lines) + "\n")
        ckpt_path = str(out_dir / "model.ckpt")
        save_checkpoint(ckpt_path, model.state_dict())
        (out_dir / "config.txt").write_text(dump_run_config(cfg))
    return TrainResult(model, log_lines, losses, ckpt_path, metrics_path)


def load_model(cfg: ModelConfig, checkpoint_path) -> PredictionModel:
    model = PredictionModel(cfg, seed=0)
    model.load_state_dict(load_checkpoint(checkpoint_path))
    return model
