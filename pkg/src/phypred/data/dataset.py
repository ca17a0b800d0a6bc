"""Sequence batches, dataset directory layout, and the persistence baseline.

A dataset split is two tensor files plus a plain-text metadata file:

    {split}_inputs.stpt    [n, T_in, C, H, W]
    {split}_targets.stpt   [n, T_out, C, H, W]
    {split}_meta.txt       key=value lines

Per-sequence randomness comes from a splitmix-style derivation so that
sequences are independent of generation order (and could be generated in
parallel).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ShapeError

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def derive_seed(seed: int, index: int) -> int:
    """Splitmix-style per-sequence seed: finalizer of seed + (index+1)*gamma."""
    z = (seed + (index + 1) * _GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


@dataclass
class SequenceBatch:
    """Input/target frame sequences with generation metadata."""

    inputs: np.ndarray   # [n, T_in, C, H, W]
    targets: np.ndarray  # [n, T_out, C, H, W]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=np.float64)
        self.targets = np.asarray(self.targets, dtype=np.float64)
        if self.inputs.ndim != 5 or self.targets.ndim != 5:
            raise ShapeError(
                f"sequence arrays must be [n,T,C,H,W], got {self.inputs.shape} "
                f"and {self.targets.shape}")
        if self.inputs.shape[0] != self.targets.shape[0] or \
                self.inputs.shape[2:] != self.targets.shape[2:]:
            raise ShapeError(
                f"inputs {self.inputs.shape} and targets {self.targets.shape} "
                f"do not describe the same sequences")
        if not (np.all(np.isfinite(self.inputs)) and
                np.all(np.isfinite(self.targets))):
            raise ShapeError("sequence batch contains non-finite values")

    @property
    def n(self) -> int:
        return self.inputs.shape[0]

    @property
    def t_in(self) -> int:
        return self.inputs.shape[1]

    @property
    def t_out(self) -> int:
        return self.targets.shape[1]

    def subset(self, idx) -> "SequenceBatch":
        return SequenceBatch(self.inputs[idx], self.targets[idx],
                             dict(self.metadata))


def persistence_baseline(inputs: np.ndarray, horizon: int) -> np.ndarray:
    """Repeat the last observed frame for every forecast step."""
    inputs = np.asarray(inputs)
    if inputs.ndim != 5 or inputs.shape[1] < 1:
        raise ShapeError(f"persistence needs [b,T_in>=1,C,H,W], got "
                         f"{inputs.shape}")
    last = inputs[:, -1:]
    return np.repeat(last, horizon, axis=1)


def save_split(directory, split: str, batch: SequenceBatch) -> None:
    from .tensorfile import write_tensor_file

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    write_tensor_file(directory / f"{split}_inputs.stpt", batch.inputs)
    write_tensor_file(directory / f"{split}_targets.stpt", batch.targets)
    lines = [f"{k}={v}" for k, v in sorted(batch.metadata.items())]
    (directory / f"{split}_meta.txt").write_text("\n".join(lines) + "\n")


def load_split(directory, split: str) -> SequenceBatch:
    from .tensorfile import read_tensor_file

    directory = Path(directory)
    inputs = read_tensor_file(directory / f"{split}_inputs.stpt")
    targets = read_tensor_file(directory / f"{split}_targets.stpt")
    metadata = {}
    meta_path = directory / f"{split}_meta.txt"
    if meta_path.exists():
        for line in meta_path.read_text().splitlines():
            line = line.strip()
            if line and "=" in line:
                key, value = line.split("=", 1)
                metadata[key] = value
    return SequenceBatch(inputs, targets, metadata)
