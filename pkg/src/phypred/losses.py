"""Training losses: pixel MSE, frequency-weighted H1, moment penalty.

The H1 loss weights the squared spectral error by (1 + 4*pi^2*|xi|^2)
with xi the signed frequency in cycles per pixel (so |xi|^2 <= 1/2 and the
weight is resolution-independent), then normalizes by the element count.
Because the weight at xi = 0 is exactly 1, an unweighted version reduces
to H*W times the plain MSE (Parseval).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autodiff import Tensor, mul_bc, no_grad, square, sub, sum_all
from .errors import ConfigError, ShapeError
from .moments import DerivativeBank, moment_loss
from .spectral import fft2


@dataclass
class LossWeights:
    lambda_h1: float = 0.05
    lambda_moment: float = 1.0

    def __post_init__(self):
        for name, v in (("lambda_h1", self.lambda_h1),
                        ("lambda_moment", self.lambda_moment)):
            if not np.isfinite(v) or v < 0:
                raise ConfigError(f"{name} must be finite and >= 0, got {v}")


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _check_same_shape(pred: Tensor, target: Tensor, what: str):
    if pred.shape != target.shape:
        raise ShapeError(f"{what}: shapes {pred.shape} and {target.shape} "
                         f"differ")


def mse_loss(pred: Tensor, target) -> Tensor:
    target = _as_tensor(target)
    _check_same_shape(pred, target, "mse_loss")
    diff = sub(pred, target)
    return sum_all(square(diff)) * (1.0 / pred.size)


def signed_frequencies(n: int) -> np.ndarray:
    """Signed frequencies in cycles per sample for an n-point DFT axis."""
    idx = np.arange(n)
    return ((idx + n // 2) % n - n // 2) / n


def h1_weights(h: int, w: int) -> np.ndarray:
    fu = signed_frequencies(h)[:, None]
    fv = signed_frequencies(w)[None, :]
    return 1.0 + 4.0 * np.pi ** 2 * (fu ** 2 + fv ** 2)


def h1_loss(pred: Tensor, target) -> Tensor:
    """Spectrally weighted squared error over [..., H, W] frames."""
    target = _as_tensor(target)
    _check_same_shape(pred, target, "h1_loss")
    if pred.ndim < 2:
        raise ShapeError(f"h1_loss needs spatial axes, got shape {pred.shape}")
    h, w = pred.shape[-2], pred.shape[-1]
    spectrum = fft2(sub(pred, target))
    power = square(spectrum.re) + square(spectrum.im)
    weighted = mul_bc(power, Tensor(h1_weights(h, w)))
    return sum_all(weighted) * (1.0 / pred.size)


def total_loss(pred: Tensor, target, bank: DerivativeBank,
               weights: LossWeights):
    """MSE + lambda_h1 * H1 + lambda_moment * moment penalty.

    Returns (scalar Tensor, breakdown dict).  Terms with zero weight are
    still reported in the breakdown but kept off the gradient graph.
    """
    target = _as_tensor(target)
    mse = mse_loss(pred, target)
    total = mse

    if weights.lambda_h1 > 0:
        h1 = h1_loss(pred, target)
        total = total + h1 * weights.lambda_h1
    else:
        with no_grad():
            h1 = h1_loss(pred, target)

    if weights.lambda_moment > 0:
        mom = moment_loss(bank)
        total = total + mom * weights.lambda_moment
    else:
        with no_grad():
            mom = moment_loss(bank)

    breakdown = {"mse": float(mse.data), "h1": float(h1.data),
                 "moment": float(mom.data), "total": float(total.data)}
    return total, breakdown
