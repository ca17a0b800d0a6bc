"""Two-stage Runge-Kutta state updates with an optional learned gate.

The conventional update advances a hidden field h with a shared derivative
estimator F:

    s1 = F(h);  s2 = F(h + s1);  h' = h + (s1 + s2) / 2.

The gated variant replaces the fixed 1/2,1/2 stage combination with an
elementwise sigmoid gate computed from both stages, which keeps a direct
multiplicative path from the loss to every layer and counteracts gradient
decay in deep stacks:

    g = sigmoid(conv1x1([s1; s2])),  h' = h + g*s1 + (1-g)*s2.

With zero gate parameters g == 1/2 exactly and both updates coincide.
The stage outputs of F are used as-is (any time-step scale is absorbed by
the trainable combination weights); the numerical-order tests scale F
externally instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .autodiff import Tensor, backward, concat, conv2d, sigmoid, square, sum_all
from .errors import IntegrationError, ShapeError
from .moments import DerivativeBank


@dataclass
class GateParams:
    """1x1 convolution producing the stage-mixing gate from [s1; s2]."""

    weight: Tensor  # [c, 2c, 1, 1]
    bias: Tensor    # [c]

    @classmethod
    def zeros(cls, c: int) -> "GateParams":
        return cls(Tensor(np.zeros((c, 2 * c, 1, 1)), requires_grad=True),
                   Tensor(np.zeros(c), requires_grad=True))

    @classmethod
    def randn(cls, c: int, rng: np.random.Generator,
              scale: float = 0.1) -> "GateParams":
        return cls(Tensor(rng.normal(0.0, scale, (c, 2 * c, 1, 1)),
                          requires_grad=True),
                   Tensor(np.zeros(c), requires_grad=True))

    def parameters(self):
        return {"weight": self.weight, "bias": self.bias}


@dataclass
class RKConfig:
    mode: str = "adaptive"  # "conventional" | "adaptive"
    dt: float = 1.0 / 3.0
    shared_bank: DerivativeBank | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.mode not in ("conventional", "adaptive"):
            raise ShapeError(f"unknown integrator mode {self.mode!r}")
        if not self.dt > 0:
            raise ShapeError(f"dt must be positive, got {self.dt}")


def _stages(h: Tensor, bank: DerivativeBank):
    s1 = bank(h)
    if not np.all(np.isfinite(s1.data)):
        raise IntegrationError("stage 1")
    s2 = bank(h + s1)
    if not np.all(np.isfinite(s2.data)):
        raise IntegrationError("stage 2")
    return s1, s2


def rk2_step(h: Tensor, bank: DerivativeBank) -> Tensor:
    """Conventional two-stage update with fixed half/half combination."""
    s1, s2 = _stages(h, bank)
    return h + (s1 + s2) * 0.5


def adaptive_rk2_step(h_hat: Tensor, bank: DerivativeBank,
                      gate: GateParams):
    """Gated two-stage update; returns (new_hidden, gate_field)."""
    c = h_hat.shape[1]
    if gate.weight.shape != (c, 2 * c, 1, 1):
        raise ShapeError(f"gate weight {gate.weight.shape} does not match "
                         f"{c} channels")
    s1, s2 = _stages(h_hat, bank)
    z = conv2d(concat([s1, s2], axis=1), gate.weight, bias=gate.bias)
    g = sigmoid(z)
    out = h_hat + g * s1 + (1.0 - g) * s2
    return out, g


def gradient_norm_probe(depth: int, mode: str, seed: int,
                        channels: int = 4, grid: int = 12,
                        filter_scale: float = 0.3,
                        combiner_scale: float = 0.3,
                        gate_scale: float = 0.3) -> list:
    """Per-layer parameter gradient norms through a deep integrator stack.

    Builds ``depth`` independently initialized derivative banks (plus gates
    in adaptive mode), runs one forward/backward from a sum-of-squares loss
    on the final state, and returns the L2 norm of each layer's
    derivative-bank gradients, layer 0 first.  Identical seeds give
    identical bank initializations and input across modes, and the norms
    cover the bank parameters only, so the two lists compare the same
    quantities.
    """
    if depth < 1:
        raise ShapeError(f"depth must be >= 1, got {depth}")
    if mode not in ("conventional", "adaptive"):
        raise ShapeError(f"unknown integrator mode {mode!r}")
    rng = np.random.default_rng(seed)
    banks = [DerivativeBank.randn(3, rng, filter_scale, combiner_scale)
             for _ in range(depth)]
    gates = [GateParams.randn(channels, rng, gate_scale) for _ in range(depth)]

    h = Tensor(rng.normal(0.0, 1.0, (1, channels, grid, grid)))
    for bank, gate in zip(banks, gates):
        if mode == "adaptive":
            h, _ = adaptive_rk2_step(h, bank, gate)
        else:
            h = rk2_step(h, bank)
    backward(sum_all(square(h)))

    norms = []
    for bank in banks:
        total = 0.0
        for p in bank.parameters().values():
            if p.grad is not None:
                total += float((p.grad * p.grad).sum())
        norms.append(float(np.sqrt(total)))
    return norms
