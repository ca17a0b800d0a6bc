"""Recurrent prediction network.

Per timestep: the frame is patch-embedded into a token grid; a stack of
windowed-attention blocks plus a convolutional LSTM produce features that
are blended with the previous hidden state through a sigmoid gate; spectral
mixing blocks enhance the result in the frequency domain; the gated
two-stage integrator advances the hidden state; a decoder maps it back to
frame space.  The hidden state written by the integrator at step t is
exactly the state consumed by the blend gate at step t+1.

Rollout consumes the input frames while carrying state (the prediction
emitted after the last input frame is the first forecast), then feeds each
prediction back as the next input, autoregressively.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autodiff import (
    Tensor,
    add_bc,
    bmm,
    concat,
    conv2d,
    depth_to_space,
    layernorm_last,
    matmul,
    mul,
    narrow,
    no_grad,
    relu,
    reshape,
    roll2,
    separable_map,
    sigmoid,
    softmax_last,
    space_to_depth,
    tanh,
    transpose,
)
from .errors import ConfigError, ShapeError
from .integrator import GateParams, adaptive_rk2_step, rk2_step
from .moments import DerivativeBank, moment_loss
from .spectral import SpectralKernel, stack_fourier_blocks

UPSAMPLERS = ("transposed_conv", "bilinear")
RK_MODES = ("conventional", "adaptive")
FOURIER_INITS = ("unit", "zero")


@dataclass
class ModelConfig:
    frame_channels: int = 1
    frame_h: int = 64
    frame_w: int = 64
    patch_size: int = 4
    embed_dim: int = 32
    n_transformer_blocks: int = 2
    n_fourier_blocks: int = 2
    window_size: int = 4
    rk_mode: str = "adaptive"
    deriv_order: int = 3
    upsampler: str = "transposed_conv"
    fourier_init: str = "zero"

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.patch_size < 1:
            raise ConfigError(f"patch_size must be >= 1, got {self.patch_size}")
        if self.frame_h % self.patch_size or self.frame_w % self.patch_size:
            raise ConfigError(
                f"frame {self.frame_h}x{self.frame_w} not divisible by patch "
                f"size {self.patch_size}")
        th, tw = self.token_h, self.token_w
        if self.n_transformer_blocks > 0 and (th % self.window_size or
                                              tw % self.window_size):
            raise ConfigError(
                f"token grid {th}x{tw} not divisible by window size "
                f"{self.window_size}")
        if self.rk_mode not in RK_MODES:
            raise ConfigError(f"rk_mode must be one of {RK_MODES}, got "
                              f"{self.rk_mode!r}")
        if self.upsampler not in UPSAMPLERS:
            raise ConfigError(f"upsampler must be one of {UPSAMPLERS}, got "
                              f"{self.upsampler!r}")
        if self.fourier_init not in FOURIER_INITS:
            raise ConfigError(f"fourier_init must be one of {FOURIER_INITS}, "
                              f"got {self.fourier_init!r}")
        if self.deriv_order % 2 == 0 or self.deriv_order < 1:
            raise ConfigError(f"deriv_order must be odd and positive, got "
                              f"{self.deriv_order}")
        if self.embed_dim < 1:
            raise ConfigError(f"embed_dim must be >= 1, got {self.embed_dim}")

    @property
    def token_h(self) -> int:
        return self.frame_h // self.patch_size

    @property
    def token_w(self) -> int:
        return self.frame_w // self.patch_size


@dataclass
class ModelState:
    """Per-sequence recurrent state threaded through timesteps."""

    hidden: Tensor
    cell: Tensor

    @classmethod
    def zeros(cls, batch: int, cfg: ModelConfig) -> "ModelState":
        shape = (batch, cfg.embed_dim, cfg.token_h, cfg.token_w)
        return cls(Tensor(np.zeros(shape)), Tensor(np.zeros(shape)))


class PatchEmbed:
    """Non-overlapping p x p patches linearly projected to the token width."""

    def __init__(self, cfg: ModelConfig, rng: np.random.Generator):
        p, cin, c = cfg.patch_size, cfg.frame_channels, cfg.embed_dim
        fan_in = cin * p * p
        self.patch = p
        self.weight = Tensor(rng.normal(0.0, fan_in ** -0.5, (c, fan_in, 1, 1)),
                             requires_grad=True)
        self.bias = Tensor(np.zeros(c), requires_grad=True)

    def parameters(self):
        return {"weight": self.weight, "bias": self.bias}

    def __call__(self, frame: Tensor) -> Tensor:
        return conv2d(space_to_depth(frame, self.patch), self.weight,
                      bias=self.bias)


class WindowAttentionBlock:
    """Pre-norm single-head attention in (optionally shifted) windows + MLP."""

    def __init__(self, c: int, window_size: int, shifted: bool,
                 rng: np.random.Generator, init_scale: float = 0.02):
        self.c = c
        self.window = window_size
        self.shifted = shifted
        self.last_attention = None  # numpy copy of the latest attention map

        def w(shape):
            return Tensor(rng.normal(0.0, init_scale, shape), requires_grad=True)

        def zeros(n):
            return Tensor(np.zeros(n), requires_grad=True)

        hidden = 2 * c
        self.ln1_g = Tensor(np.ones(c), requires_grad=True)
        self.ln1_b = zeros(c)
        self.wq, self.wk, self.wv = w((c, c)), w((c, c)), w((c, c))
        self.bq, self.bk, self.bv = zeros(c), zeros(c), zeros(c)
        self.wo, self.bo = w((c, c)), zeros(c)
        self.ln2_g = Tensor(np.ones(c), requires_grad=True)
        self.ln2_b = zeros(c)
        self.w1, self.b1 = w((c, hidden)), zeros(hidden)
        self.w2, self.b2 = w((hidden, c)), zeros(c)

    def parameters(self):
        return {"ln1_g": self.ln1_g, "ln1_b": self.ln1_b,
                "wq": self.wq, "bq": self.bq, "wk": self.wk, "bk": self.bk,
                "wv": self.wv, "bv": self.bv, "wo": self.wo, "bo": self.bo,
                "ln2_g": self.ln2_g, "ln2_b": self.ln2_b,
                "w1": self.w1, "b1": self.b1, "w2": self.w2, "b2": self.b2}

    def _proj(self, flat: Tensor, w: Tensor, b: Tensor) -> Tensor:
        return add_bc(matmul(flat, w), b)

    def __call__(self, u: Tensor) -> Tensor:
        b, c, h, w = u.shape
        ws = self.window
        if h % ws or w % ws:
            raise ShapeError(f"token grid {h}x{w} not divisible by window {ws}")
        t = ws * ws
        nwin = (h // ws) * (w // ws)

        x = transpose(u, (0, 2, 3, 1))  # [b,h,w,c]
        if self.shifted:
            x = roll2(x, (-(ws // 2), -(ws // 2)), (1, 2))
        x = reshape(x, (b, h // ws, ws, w // ws, ws, c))
        x = transpose(x, (0, 1, 3, 2, 4, 5))
        x = reshape(x, (b * nwin, t, c))

        # attention sublayer
        xn = layernorm_last(x, self.ln1_g, self.ln1_b)
        flat = reshape(xn, (b * nwin * t, c))
        q = reshape(self._proj(flat, self.wq, self.bq), (b * nwin, t, c))
        kk = reshape(self._proj(flat, self.wk, self.bk), (b * nwin, t, c))
        v = reshape(self._proj(flat, self.wv, self.bv), (b * nwin, t, c))
        scores = bmm(q, transpose(kk, (0, 2, 1))) * (c ** -0.5)
        attn = softmax_last(scores)
        self.last_attention = attn.data
        o = reshape(bmm(attn, v), (b * nwin * t, c))
        o = reshape(self._proj(o, self.wo, self.bo), (b * nwin, t, c))
        x = x + o

        # mlp sublayer
        xn = layernorm_last(x, self.ln2_g, self.ln2_b)
        flat = reshape(xn, (b * nwin * t, c))
        m = relu(self._proj(flat, self.w1, self.b1))
        m = self._proj(m, self.w2, self.b2)
        x = x + reshape(m, (b * nwin, t, c))

        x = reshape(x, (b, h // ws, w // ws, ws, ws, c))
        x = transpose(x, (0, 1, 3, 2, 4, 5))
        x = reshape(x, (b, h, w, c))
        if self.shifted:
            x = roll2(x, (ws // 2, ws // 2), (1, 2))
        return transpose(x, (0, 3, 1, 2))


class ConvLSTMCell:
    """LSTM with 1x1 gate convolutions over [tokens; previous hidden]."""

    def __init__(self, c: int, rng: np.random.Generator,
                 init_scale: float = 0.02, forget_bias: float = 1.0):
        self.c = c
        self.weight = Tensor(rng.normal(0.0, init_scale, (4 * c, 2 * c, 1, 1)),
                             requires_grad=True)
        bias = np.zeros(4 * c)
        bias[c:2 * c] = forget_bias  # slow forgetting at init
        self.bias = Tensor(bias, requires_grad=True)

    def parameters(self):
        return {"weight": self.weight, "bias": self.bias}

    def __call__(self, u: Tensor, state: ModelState):
        c = self.c
        gates = conv2d(concat([u, state.hidden], axis=1), self.weight,
                       bias=self.bias)
        i = sigmoid(narrow(gates, 1, 0, c))
        f = sigmoid(narrow(gates, 1, c, c))
        o = sigmoid(narrow(gates, 1, 2 * c, c))
        cand = tanh(narrow(gates, 1, 3 * c, c))
        new_cell = f * state.cell + i * cand
        hidden = o * tanh(new_cell)
        return hidden, new_cell


def blend_with_state(features: Tensor, hidden: Tensor) -> Tensor:
    """Gated blend K = sigmoid(features): hidden + K * (features - hidden).

    Algebraically identical to (1-K)*hidden + K*features; large positive
    features drive the output to the features, large negative to the
    carried hidden state.
    """
    gate = sigmoid(features)
    return hidden + gate * (features - hidden)


class CorrectionModule:
    """Spatial attention stack + LSTM, blended with the carried hidden state.

    The blend gate K = sigmoid(features) mixes the previous hidden state H
    with the new features:  out = H + K * (features - H).
    """

    def __init__(self, cfg: ModelConfig, rng: np.random.Generator):
        self.blocks = [
            WindowAttentionBlock(cfg.embed_dim, cfg.window_size,
                                 shifted=(idx % 2 == 1), rng=rng)
            for idx in range(cfg.n_transformer_blocks)
        ]
        self.lstm = ConvLSTMCell(cfg.embed_dim, rng)

    def parameters(self):
        out = {}
        for idx, blk in enumerate(self.blocks):
            for name, p in blk.parameters().items():
                out[f"tb{idx}.{name}"] = p
        for name, p in self.lstm.parameters().items():
            out[f"lstm.{name}"] = p
        return out

    def __call__(self, u: Tensor, state: ModelState):
        v = u
        for blk in self.blocks:
            v = blk(v)
        u_tl, new_cell = self.lstm(v, state)
        return blend_with_state(u_tl, state.hidden), new_cell


class Decoder:
    """Token grid back to frame space.

    ``transposed_conv``: a learned p-stride transposed convolution,
    realized as a 1x1 projection to C*p*p channels followed by the exact
    depth-to-space rearrangement.  ``bilinear``: fixed x-p bilinear
    upsampling (half-pixel centers, clamped edges) followed by a learned
    1x1 projection.
    """

    def __init__(self, cfg: ModelConfig, rng: np.random.Generator):
        p, cout, c = cfg.patch_size, cfg.frame_channels, cfg.embed_dim
        self.patch = p
        self.kind = cfg.upsampler
        if self.kind == "transposed_conv":
            self.weight = Tensor(rng.normal(0.0, c ** -0.5, (cout * p * p, c, 1, 1)),
                                 requires_grad=True)
            self.bias = Tensor(np.zeros(cout * p * p), requires_grad=True)
        else:
            self.weight = Tensor(rng.normal(0.0, c ** -0.5, (cout, c, 1, 1)),
                                 requires_grad=True)
            self.bias = Tensor(np.zeros(cout), requires_grad=True)
            self.row_mat = bilinear_matrix(cfg.token_h, p)
            self.col_mat = bilinear_matrix(cfg.token_w, p)

    def parameters(self):
        return {"weight": self.weight, "bias": self.bias}

    def __call__(self, hidden: Tensor) -> Tensor:
        if self.kind == "transposed_conv":
            return depth_to_space(conv2d(hidden, self.weight, bias=self.bias),
                                  self.patch)
        up = separable_map(hidden, self.row_mat, self.col_mat)
        return conv2d(up, self.weight, bias=self.bias)


def bilinear_matrix(n_in: int, factor: int) -> np.ndarray:
    """Dense 1D bilinear-upsampling matrix with half-pixel alignment."""
    n_out = n_in * factor
    src = (np.arange(n_out) + 0.5) / factor - 0.5
    src = np.clip(src, 0.0, n_in - 1.0)
    lo = np.floor(src).astype(int)
    hi = np.minimum(lo + 1, n_in - 1)
    frac = src - lo
    mat = np.zeros((n_out, n_in))
    mat[np.arange(n_out), lo] += 1.0 - frac
    mat[np.arange(n_out), hi] += frac
    return mat


class PredictionModel:
    """Full recurrent model; see the module docstring for the dataflow."""

    def __init__(self, cfg: ModelConfig, seed: int = 0):
        cfg.validate()
        self.cfg = cfg
        rng = np.random.default_rng(seed)
        c, th, tw = cfg.embed_dim, cfg.token_h, cfg.token_w

        self.patch = PatchEmbed(cfg, rng)
        self.correction = CorrectionModule(cfg, rng)
        if cfg.fourier_init == "unit":
            self.kernels = [SpectralKernel.identity(c, th, tw)
                            for _ in range(cfg.n_fourier_blocks)]
        else:
            self.kernels = [SpectralKernel.zeros(c, th, tw)
                            for _ in range(cfg.n_fourier_blocks)]
        self.bank = DerivativeBank.randn(cfg.deriv_order, rng,
                                         filter_scale=0.02)
        self.gate = GateParams.zeros(c) if cfg.rk_mode == "adaptive" else None
        self.decoder = Decoder(cfg, rng)

    # -- parameter registry --------------------------------------------------

    def named_parameters(self) -> dict:
        out = {}
        for name, p in self.patch.parameters().items():
            out[f"patch.{name}"] = p
        for name, p in self.correction.parameters().items():
            out[name] = p
        for idx, k in enumerate(self.kernels):
            out[f"fb{idx}.re"] = k.re
            out[f"fb{idx}.im"] = k.im
        for name, p in self.bank.parameters().items():
            out[f"bank.{name}"] = p
        if self.gate is not None:
            for name, p in self.gate.parameters().items():
                out[f"gate.{name}"] = p
        for name, p in self.decoder.parameters().items():
            out[f"decoder.{name}"] = p
        return out

    def zero_grad(self):
        for p in self.named_parameters().values():
            p.zero_grad()

    def state_dict(self) -> dict:
        return {name: np.array(p.data, copy=True)
                for name, p in self.named_parameters().items()}

    def load_state_dict(self, arrays: dict):
        from .errors import CheckpointError
        params = self.named_parameters()
        missing = set(params) - set(arrays)
        extra = set(arrays) - set(params)
        if missing or extra:
            raise CheckpointError(f"parameter names do not match: missing "
                                  f"{sorted(missing)}, unexpected {sorted(extra)}")
        for name, p in params.items():
            arr = np.asarray(arrays[name], dtype=np.float64)
            if arr.shape != p.shape:
                raise CheckpointError(f"shape mismatch for {name!r}: checkpoint "
                                      f"{arr.shape} vs model {p.shape}")
            p.data = np.ascontiguousarray(arr)

    # -- forward -------------------------------------------------------------

    def initial_state(self, batch: int) -> ModelState:
        return ModelState.zeros(batch, self.cfg)

    def step(self, x_t: Tensor, state: ModelState, diagnostics: bool = True):
        """One timestep: returns (next-frame prediction, new state, diagnostics)."""
        cfg = self.cfg
        u = self.patch(x_t)
        u_cm, new_cell = self.correction(u, state)
        u_f = stack_fourier_blocks(u_cm, self.kernels, cfg.n_fourier_blocks)
        h_hat = u_f + u_cm
        if cfg.rk_mode == "adaptive":
            hidden, gate_field = adaptive_rk2_step(h_hat, self.bank, self.gate)
        else:
            hidden = rk2_step(h_hat, self.bank)
            gate_field = None
        x_hat = self.decoder(hidden)
        diag = None
        if diagnostics:
            if gate_field is None:
                gate_stats = (0.5, 0.5, 0.5)
            else:
                gate_stats = (float(gate_field.data.mean()),
                              float(gate_field.data.min()),
                              float(gate_field.data.max()))
            with no_grad():
                mloss = float(moment_loss(self.bank).data)
            diag = {"gate_mean": gate_stats[0], "gate_min": gate_stats[1],
                    "gate_max": gate_stats[2], "moment_loss": mloss}
        return x_hat, ModelState(hidden, new_cell), diag

    def rollout(self, inputs, horizon: int) -> Tensor:
        """Warm up on the input frames, then forecast autoregressively.

        ``inputs`` is [b, T_in, C, H, W] (numpy or Tensor).  The prediction
        emitted after consuming the last input frame is the first of the
        ``horizon`` outputs; each subsequent step feeds the previous
        prediction back as input.
        """
        if horizon < 1:
            raise ShapeError(f"horizon must be >= 1, got {horizon}")
        data = inputs.data if isinstance(inputs, Tensor) else np.asarray(inputs)
        if data.ndim != 5:
            raise ShapeError(f"rollout inputs must be [b,T,C,H,W], got "
                             f"{data.shape}")
        b, t_in = data.shape[0], data.shape[1]
        if t_in < 1:
            raise ShapeError("rollout needs at least one input frame")
        state = self.initial_state(b)
        pred = None
        for t in range(t_in):
            pred, state, _ = self.step(Tensor(data[:, t]), state,
                                       diagnostics=False)
        preds = [pred]
        for _ in range(horizon - 1):
            pred, state, _ = self.step(preds[-1], state, diagnostics=False)
            preds.append(pred)
        frames = [reshape(p, (b, 1) + p.shape[1:]) for p in preds]
        return concat(frames, axis=1)


def parameter_count(cfg: ModelConfig) -> int:
    """Closed-form trainable parameter count; guards wiring regressions."""
    c = cfg.embed_dim
    cin = cfg.frame_channels
    p = cfg.patch_size
    k = cfg.deriv_order
    th, tw = cfg.token_h, cfg.token_w

    patch = c * cin * p * p + c
    per_block = 8 * c * c + 11 * c  # qkv/o + lns + 2-layer mlp (hidden 2c)
    tbs = cfg.n_transformer_blocks * per_block
    lstm = 4 * c * 2 * c + 4 * c
    fbs = cfg.n_fourier_blocks * 2 * c * th * tw
    bank = k ** 4 + k ** 2
    gate = (2 * c * c + c) if cfg.rk_mode == "adaptive" else 0
    if cfg.upsampler == "transposed_conv":
        dec = cin * p * p * c + cin * p * p
    else:
        dec = cin * c + cin
    return patch + tbs + lstm + fbs + bank + gate + dec
