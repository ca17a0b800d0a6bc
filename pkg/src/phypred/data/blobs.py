"""Bouncing Gaussian blob sequences: digit-free stand-in for bouncing-object
video benchmarks.  Blobs move with constant velocity and reflect specularly
off the frame edges; frames are the clamped sum of blob intensities.
"""

from __future__ import annotations

import numpy as np

from ..errors import ShapeError
from .dataset import SequenceBatch, derive_seed


def blob_positions(start, velocity, n_frames: int, h: int, w: int) -> np.ndarray:
    """Trajectory [T, 2] of (row, col) centers with specular wall bounces.

    Blob centers live in [0, h-1] x [0, w-1]; velocity flips sign on each
    reflection.  Steps are short relative to the frame, so per-step
    reflections are resolved iteratively.
    """
    pos = np.array(start, dtype=np.float64)
    vel = np.array(velocity, dtype=np.float64)
    out = np.zeros((n_frames, 2))
    limits = (h - 1.0, w - 1.0)
    for t in range(n_frames):
        out[t] = pos
        pos = pos + vel
        for axis in (0, 1):
            hi = limits[axis]
            while pos[axis] < 0.0 or pos[axis] > hi:
                if pos[axis] < 0.0:
                    pos[axis] = -pos[axis]
                else:
                    pos[axis] = 2.0 * hi - pos[axis]
                vel[axis] = -vel[axis]
    return out


def render_blobs(centers, sigmas, h: int, w: int) -> np.ndarray:
    """Sum of unit-peak isotropic Gaussians, clamped to [0, 1]."""
    rows = np.arange(h)[:, None]
    cols = np.arange(w)[None, :]
    frame = np.zeros((h, w))
    for (cy, cx), sigma in zip(centers, sigmas):
        d2 = (rows - cy) ** 2 + (cols - cx) ** 2
        frame += np.exp(-d2 / (2.0 * sigma ** 2))
    return np.clip(frame, 0.0, 1.0)


def gen_bouncing_blobs(n_seq: int, t_in: int, t_out: int, h: int, w: int,
                       n_blobs: int = 2, seed: int = 0,
                       sigma_range=(1.5, 3.0),
                       speed_range=(0.5, 2.0)) -> SequenceBatch:
    if h < 16 or w < 16:
        raise ShapeError(f"blob frames need h,w >= 16, got {h}x{w}")
    total = t_in + t_out
    frames = np.zeros((n_seq, total, 1, h, w))
    for s in range(n_seq):
        rng = np.random.default_rng(derive_seed(seed, s))
        trajectories = []
        sigmas = rng.uniform(sigma_range[0], sigma_range[1], n_blobs)
        for _ in range(n_blobs):
            start = (rng.uniform(2.0, h - 3.0), rng.uniform(2.0, w - 3.0))
            speed = rng.uniform(speed_range[0], speed_range[1])
            angle = rng.uniform(0.0, 2.0 * np.pi)
            vel = (speed * np.sin(angle), speed * np.cos(angle))
            trajectories.append(blob_positions(start, vel, total, h, w))
        for t in range(total):
            centers = [traj[t] for traj in trajectories]
            frames[s, t, 0] = render_blobs(centers, sigmas, h, w)
    meta = {"generator": "bouncing_blobs", "seed": str(seed),
            "n_blobs": str(n_blobs), "h": str(h), "w": str(w)}
    return SequenceBatch(frames[:, :t_in], frames[:, t_in:], meta)
