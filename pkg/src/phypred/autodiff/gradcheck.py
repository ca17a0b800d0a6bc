"""Central-difference verification of reverse-mode gradients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NonFiniteError
from .tensor import Tensor, backward, no_grad


@dataclass
class GradCheckReport:
    max_rel_discrepancy: float
    tol: float
    passed: bool
    n_checked: int
    worst_index: tuple

    def __str__(self):
        status = "PASS" if self.passed else "FAIL"
        return (f"gradcheck {status}: max rel discrepancy "
                f"{self.max_rel_discrepancy:.3e} over {self.n_checked} "
                f"elements (tol {self.tol:.1e}, worst at {self.worst_index})")


def check_gradient(f, x: Tensor, step: float = 1e-6,
                   tol: float = 1e-4) -> GradCheckReport:
    """Compare reverse-mode d f/d x against central finite differences.

    ``f`` maps a Tensor to a scalar Tensor and is re-evaluated per probe,
    so it must be deterministic.  The per-element discrepancy is
    |analytic - numeric| / max(1, |analytic|, |numeric|); the report
    carries the maximum.
    """
    if step <= 0:
        raise ValueError("check_gradient: step must be positive")
    leaf = Tensor(np.array(x.data, copy=True), requires_grad=True)
    loss = f(leaf)
    if not np.all(np.isfinite(loss.data)):
        raise NonFiniteError("check_gradient: f(x) is not finite")
    backward(loss)
    analytic = np.zeros_like(leaf.data) if leaf.grad is None else leaf.grad

    numeric = np.zeros_like(leaf.data)
    flat = leaf.data.reshape(-1)
    num_flat = numeric.reshape(-1)
    with no_grad():
        for i in range(flat.size):
            keep = flat[i]
            flat[i] = keep + step
            hi = float(f(Tensor(leaf.data)).data)
            flat[i] = keep - step
            lo = float(f(Tensor(leaf.data)).data)
            flat[i] = keep
            if not (np.isfinite(hi) and np.isfinite(lo)):
                raise NonFiniteError("check_gradient: f(x +/- step) is not finite")
            num_flat[i] = (hi - lo) / (2.0 * step)

    return _report(analytic, numeric, tol)


def check_parameter_gradient(loss_fn, param: Tensor, step: float = 1e-6,
                             tol: float = 1e-4) -> GradCheckReport:
    """Like ``check_gradient`` but for a leaf owned by a model.

    ``loss_fn`` takes no arguments and closes over the model; the check
    perturbs ``param.data`` in place (restoring it afterwards).
    """
    if step <= 0:
        raise ValueError("check_parameter_gradient: step must be positive")
    param.zero_grad()
    loss = loss_fn()
    if not np.all(np.isfinite(loss.data)):
        raise NonFiniteError("check_parameter_gradient: loss is not finite")
    backward(loss)
    analytic = (np.zeros_like(param.data) if param.grad is None
                else np.array(param.grad, copy=True))
    param.zero_grad()

    numeric = np.zeros_like(param.data)
    flat = param.data.reshape(-1)
    num_flat = numeric.reshape(-1)
    with no_grad():
        for i in range(flat.size):
            keep = flat[i]
            flat[i] = keep + step
            hi = float(loss_fn().data)
            flat[i] = keep - step
            lo = float(loss_fn().data)
            flat[i] = keep
            if not (np.isfinite(hi) and np.isfinite(lo)):
                raise NonFiniteError(
                    "check_parameter_gradient: perturbed loss is not finite")
            num_flat[i] = (hi - lo) / (2.0 * step)
    return _report(analytic, numeric, tol)


def _report(analytic: np.ndarray, numeric: np.ndarray,
            tol: float) -> GradCheckReport:
    denom = np.maximum(1.0, np.maximum(np.abs(analytic), np.abs(numeric)))
    rel = np.abs(analytic - numeric) / denom
    worst = np.unravel_index(int(np.argmax(rel)), rel.shape) if rel.size else ()
    worst_val = float(rel.max()) if rel.size else 0.0
    return GradCheckReport(worst_val, tol, bool(worst_val < tol),
                           int(rel.size), tuple(int(i) for i in worst))
