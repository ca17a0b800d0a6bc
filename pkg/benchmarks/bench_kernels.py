"""Compare the compiled convolution kernels against the numpy fallback.

Runs the conv2d forward/backward trio on model-shaped workloads plus a
full training step with each backend.  Usage:

    python benchmarks/bench_kernels.py [--repeats N]

The backend used by the package is fixed at import, so the training-step
comparison re-launches itself in a subprocess per backend.
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time

import numpy as np

SHAPES = [
    # (label, b, cin, cout, h, w, k)
    ("bank stencil 64x(16x16)", 64, 1, 1, 16, 16, 3),
    ("bank expanded 64x(16x16)", 64, 1, 9, 16, 16, 3),
    ("generic 3x3 8x(32x32)", 8, 8, 8, 32, 32, 3),
    ("generic 5x5 4x(24x24)", 4, 4, 8, 24, 24, 5),
]


def bench_convs(repeats: int):
    from phypred.kernels import _numpy_backend as npb

    try:
        from phypred.kernels import _ckernels as ck
    except ImportError:
        ck = None
        print("compiled kernels unavailable; showing numpy only")

    rng = np.random.default_rng(0)
    header = f"{'workload':>28} {'direction':>9} {'numpy':>10} {'cython':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, b, cin, cout, h, w, k in SHAPES:
        x = rng.normal(size=(b, cin, h, w))
        wt = rng.normal(size=(cout, cin, k, k))
        p = (k - 1) // 2
        gy = rng.normal(size=(b, cout, h, w))

        runs = {
            "forward": (lambda m: m.conv2d_forward(x, wt, p, p)),
            "bwd-in": (lambda m: m.conv2d_backward_input(gy, wt, p, p, h, w)),
            "bwd-wt": (lambda m: m.conv2d_backward_weight(gy, x, p, p, k, k)),
        }
        for direction, fn in runs.items():
            t_np = _time(lambda: fn(npb), repeats)
            if ck is None:
                print(f"{label:>28} {direction:>9} {t_np * 1e3:>9.2f}ms "
                      f"{'-':>10} {'-':>8}")
                continue
            t_cy = _time(lambda: fn(ck), repeats)
            print(f"{label:>28} {direction:>9} {t_np * 1e3:>9.2f}ms "
                  f"{t_cy * 1e3:>9.2f}ms {t_np / t_cy:>7.2f}x")


def _time(fn, repeats: int) -> float:
    fn()  # warm up
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def bench_train_step(repeats: int):
    """One full training step of the default blob model."""
    from phypred.autodiff import Tensor, backward
    from phypred.data import gen_bouncing_blobs
    from phypred.kernels import BACKEND
    from phypred.losses import LossWeights, total_loss
    from phypred.model import ModelConfig, PredictionModel
    from phypred.train import Adam, clip_grad_norm

    cfg = ModelConfig(frame_h=64, frame_w=64, patch_size=4, embed_dim=32,
                      n_transformer_blocks=2, n_fourier_blocks=2,
                      window_size=4)
    model = PredictionModel(cfg, seed=0)
    data = gen_bouncing_blobs(4, 10, 10, 64, 64, seed=0)
    params = model.named_parameters()
    opt = Adam(params, lr=2e-3)
    weights = LossWeights()

    def step():
        preds = model.rollout(data.inputs[:2], 10)
        loss, _ = total_loss(preds, Tensor(data.targets[:2]), model.bank,
                             weights)
        backward(loss)
        clip_grad_norm(params, 1.0)
        opt.step()
        opt.zero_grad()

    t = _time(step, repeats)
    print(f"train step ({BACKEND:>6} backend): {t:.3f}s")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=10)
    parser.add_argument("--train-step-only", action="store_true")
    args = parser.parse_args()

    if args.train_step_only:
        bench_train_step(max(2, args.repeats // 3))
        return

    bench_convs(args.repeats)
    print()
    for backend in ("python", "cython"):
        env = dict(os.environ, PHYPRED_KERNELS=backend)
        try:
            subprocess.run([sys.executable, __file__, "--train-step-only",
                            "--repeats", str(args.repeats)], env=env,
                           check=True)
        except subprocess.CalledProcessError:
            print(f"train-step benchmark failed for backend {backend!r}")


if __name__ == "__main__":
    main()
