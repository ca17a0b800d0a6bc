"""Periodic advection-diffusion sequences on a unit-spaced grid.

    du/dt = -(vx * du/dx + vy * du/dy) + nu * laplacian(u)

x runs along columns and y along rows.  Space is discretized with centered
second-order differences (5-point Laplacian); time stepping is Heun's
two-stage rule per substep, which keeps the centered advection term stable
at the step sizes admitted by the stability precondition below.  Both the
semi-discrete operator and the two-stage combination conserve the spatial
mean exactly, and pure diffusion is non-expansive in variance.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from .dataset import SequenceBatch, derive_seed


def advection_diffusion_rhs(u: np.ndarray, vx: float, vy: float,
                            nu: float) -> np.ndarray:
    dudx = 0.5 * (np.roll(u, -1, axis=1) - np.roll(u, 1, axis=1))
    dudy = 0.5 * (np.roll(u, -1, axis=0) - np.roll(u, 1, axis=0))
    lap = (np.roll(u, 1, axis=0) + np.roll(u, -1, axis=0) +
           np.roll(u, 1, axis=1) + np.roll(u, -1, axis=1) - 4.0 * u)
    return -(vx * dudx + vy * dudy) + nu * lap


def heun_substep(u: np.ndarray, dt: float, vx: float, vy: float,
                 nu: float) -> np.ndarray:
    k1 = advection_diffusion_rhs(u, vx, vy, nu)
    k2 = advection_diffusion_rhs(u + dt * k1, vx, vy, nu)
    return u + 0.5 * dt * (k1 + k2)


def check_stability(vx: float, vy: float, nu: float, dt: float) -> None:
    """Advective CFL and diffusive step bounds for unit grid spacing."""
    if (abs(vx) + abs(vy)) * dt > 1.0:
        raise ConfigError(
            f"advective CFL violated: (|vx|+|vy|)*dt = "
            f"{(abs(vx) + abs(vy)) * dt:.3f} > 1")
    if nu * dt * 2.0 > 0.25:
        raise ConfigError(
            f"diffusive stability violated: nu*dt*(1/dx^2+1/dy^2) = "
            f"{nu * dt * 2.0:.3f} > 0.25")


def smooth_random_field(rng: np.random.Generator, h: int, w: int,
                        cutoff_frac: float = 0.15) -> np.ndarray:
    """Low-pass-filtered white noise, min-max normalized to [0, 1]."""
    noise = rng.standard_normal((h, w))
    spec = np.fft.fft2(noise)
    fy = np.fft.fftfreq(h)[:, None]
    fx = np.fft.fftfreq(w)[None, :]
    mask = (np.abs(fy) <= cutoff_frac) & (np.abs(fx) <= cutoff_frac)
    field = np.fft.ifft2(spec * mask).real
    lo, hi = field.min(), field.max()
    if hi - lo < 1e-12:
        return np.full((h, w), 0.5)
    return (field - lo) / (hi - lo)


def simulate_advection(u0: np.ndarray, n_frames: int, vx: float, vy: float,
                       nu: float, frame_dt: float = 1.0,
                       substeps: int = 8) -> np.ndarray:
    """Frames [T, H, W] sampled every ``frame_dt``; frame 0 is u0."""
    dt = frame_dt / substeps
    check_stability(vx, vy, nu, dt)
    frames = np.zeros((n_frames,) + u0.shape)
    u = np.array(u0, dtype=np.float64)
    frames[0] = u
    for t in range(1, n_frames):
        for _ in range(substeps):
            u = heun_substep(u, dt, vx, vy, nu)
        frames[t] = u
    return frames


def gen_advection_diffusion(n_seq: int, t_in: int, t_out: int, h: int, w: int,
                            velocity=(0.6, 0.3), nu: float = 0.05,
                            seed: int = 0, frame_dt: float = 1.0,
                            substeps: int = 8) -> SequenceBatch:
    vx, vy = float(velocity[0]), float(velocity[1])
    check_stability(vx, vy, nu, frame_dt / substeps)
    total = t_in + t_out
    frames = np.zeros((n_seq, total, 1, h, w))
    for s in range(n_seq):
        rng = np.random.default_rng(derive_seed(seed, s))
        u0 = smooth_random_field(rng, h, w)
        frames[s, :, 0] = simulate_advection(u0, total, vx, vy, nu,
                                             frame_dt, substeps)
    meta = {"generator": "advection_diffusion", "seed": str(seed),
            "vx": str(vx), "vy": str(vy), "nu": str(nu)}
    return SequenceBatch(frames[:, :t_in], frames[:, t_in:], meta)
