"""Evaluation metrics on plain numpy arrays (no gradients).

``mse_metric``/``mae_metric`` support either a global mean or the
per-frame-sum convention common in video-prediction benchmarks.  SSIM
uses the classic 11x11 Gaussian window with sigma 1.5 and stability
constants C1=(0.01*range)^2, C2=(0.03*range)^2, averaged over channels
and valid window positions.
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeError

REDUCTIONS = ("mean", "sum_per_frame")


def _check(pred, target, what):
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ShapeError(f"{what}: shapes {pred.shape} and {target.shape} "
                         f"differ")
    return pred, target


def mse_metric(pred, target, reduction: str = "mean") -> float:
    pred, target = _check(pred, target, "mse_metric")
    err = (pred - target) ** 2
    return _reduce(err, reduction)


def mae_metric(pred, target, reduction: str = "mean") -> float:
    pred, target = _check(pred, target, "mae_metric")
    return _reduce(np.abs(pred - target), reduction)


def _reduce(err: np.ndarray, reduction: str) -> float:
    if reduction == "mean":
        return float(err.mean())
    if reduction == "sum_per_frame":
        # sum over pixels/channels of one frame, averaged over frames
        frame_axes = tuple(range(err.ndim - 3, err.ndim))
        return float(err.sum(axis=frame_axes).mean())
    raise ShapeError(f"unknown reduction {reduction!r}; pick from {REDUCTIONS}")


def nmse(pred, target) -> float:
    """||pred-target||^2 / ||target||^2 per sample, averaged over the batch."""
    pred, target = _check(pred, target, "nmse")
    if pred.ndim < 2:
        pred = pred[None]
        target = target[None]
    b = pred.shape[0]
    p = pred.reshape(b, -1)
    t = target.reshape(b, -1)
    t_norm = (t ** 2).sum(axis=1)
    if np.any(t_norm == 0):
        raise ShapeError("nmse: target has zero norm for at least one sample")
    return float((((p - t) ** 2).sum(axis=1) / t_norm).mean())


_GAUSS_CACHE: dict = {}


def gaussian_window(size: int = 11, sigma: float = 1.5) -> np.ndarray:
    key = (size, sigma)
    win = _GAUSS_CACHE.get(key)
    if win is None:
        ax = np.arange(size) - (size - 1) / 2.0
        g = np.exp(-(ax ** 2) / (2.0 * sigma ** 2))
        k = np.outer(g, g)
        win = k / k.sum()
        _GAUSS_CACHE[key] = win
    return win


def _windowed(x: np.ndarray, win: np.ndarray) -> np.ndarray:
    """Valid-mode weighted local sums of a 2D array."""
    view = np.lib.stride_tricks.sliding_window_view(x, win.shape)
    return np.einsum("ijuv,uv->ij", view, win, optimize=True)


def ssim(pred, target, data_range: float = 1.0, window_size: int = 11,
         sigma: float = 1.5) -> float:
    """Mean local structural similarity of two [C,H,W] frames."""
    pred, target = _check(pred, target, "ssim")
    if pred.ndim == 2:
        pred = pred[None]
        target = target[None]
    if pred.ndim != 3:
        raise ShapeError(f"ssim expects [C,H,W] frames, got {pred.shape}")
    c, h, w = pred.shape
    if h < window_size or w < window_size:
        raise ShapeError(f"ssim: frame {h}x{w} smaller than window "
                         f"{window_size}")
    win = gaussian_window(window_size, sigma)
    c1 = (0.01 * data_range) ** 2
    c2 = (0.03 * data_range) ** 2
    scores = []
    for ch in range(c):
        x, y = pred[ch], target[ch]
        mx = _windowed(x, win)
        my = _windowed(y, win)
        mxx = _windowed(x * x, win)
        myy = _windowed(y * y, win)
        mxy = _windowed(x * y, win)
        vx = mxx - mx * mx
        vy = myy - my * my
        cov = mxy - mx * my
        num = (2 * mx * my + c1) * (2 * cov + c2)
        den = (mx * mx + my * my + c1) * (vx + vy + c2)
        scores.append((num / den).mean())
    return float(np.mean(scores))
