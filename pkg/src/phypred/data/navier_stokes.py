"""Pseudo-spectral 2D Navier-Stokes (vorticity form) on the unit torus.

    dw/dt + u . grad(w) = nu * laplacian(w) + f

The velocity comes from the streamfunction (psi_hat = w_hat / |k|^2,
u = d(psi)/dy, v = -d(psi)/dx), the nonlinear term is evaluated in
physical space under a 2/3-rule dealiasing mask, and time stepping is
classical RK4 on the spectral coefficients.  x runs along columns, y along
rows; wavenumbers are 2*pi*m for integer mode m.  Defaults follow the
usual operator-learning benchmark setup: nu = 1e-3 and the steady forcing
0.1*(sin(2*pi*(x+y)) + cos(2*pi*(x+y))).
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError, SolverError
from .dataset import SequenceBatch, derive_seed

BLOWUP_LIMIT = 1e6


class _SpectralWorkspace:
    def __init__(self, n: int):
        m = np.fft.fftfreq(n, d=1.0 / n)  # integer modes
        self.kx = 2.0 * np.pi * m[None, :]  # along columns (x)
        self.ky = 2.0 * np.pi * m[:, None]  # along rows (y)
        self.k2 = self.kx ** 2 + self.ky ** 2
        k2_inv = np.zeros_like(self.k2)
        nonzero = self.k2 > 0
        k2_inv[nonzero] = 1.0 / self.k2[nonzero]
        self.k2_inv = k2_inv
        cutoff = n // 3
        self.dealias = (np.abs(m[None, :]) <= cutoff) & \
                       (np.abs(m[:, None]) <= cutoff)


_workspaces: dict = {}


def _workspace(n: int) -> _SpectralWorkspace:
    ws = _workspaces.get(n)
    if ws is None:
        ws = _SpectralWorkspace(n)
        _workspaces[n] = ws
    return ws


def standard_forcing(n: int, amplitude: float = 0.1) -> np.ndarray:
    grid = np.arange(n) / n
    x = grid[None, :]
    y = grid[:, None]
    phase = 2.0 * np.pi * (x + y)
    return amplitude * (np.sin(phase) + np.cos(phase))


def random_vorticity(rng: np.random.Generator, n: int, tau: float = 7.0,
                     alpha: float = 2.5) -> np.ndarray:
    """Periodic Gaussian random field with power-law spectral decay."""
    ws = _workspace(n)
    coef = tau ** (alpha - 1.0) * (ws.k2 + tau ** 2) ** (-alpha / 2.0)
    noise_hat = np.fft.fft2(rng.standard_normal((n, n)))
    field_hat = n * coef * noise_hat
    field_hat[0, 0] = 0.0  # zero mean
    return np.fft.ifft2(field_hat).real


def _rhs(w_hat: np.ndarray, ws: _SpectralWorkspace, nu: float,
         f_hat: np.ndarray | None) -> np.ndarray:
    psi_hat = w_hat * ws.k2_inv
    u = np.fft.ifft2(1j * ws.ky * psi_hat).real
    v = np.fft.ifft2(-1j * ws.kx * psi_hat).real
    wx = np.fft.ifft2(1j * ws.kx * w_hat).real
    wy = np.fft.ifft2(1j * ws.ky * w_hat).real
    nonlinear_hat = np.fft.fft2(u * wx + v * wy) * ws.dealias
    out = -nonlinear_hat - nu * ws.k2 * w_hat
    if f_hat is not None:
        out = out + f_hat
    return out


def simulate_vorticity(w0: np.ndarray, n_frames: int, nu: float,
                       frame_interval: float = 1.0, dt: float = 0.01,
                       forcing: np.ndarray | None = None) -> np.ndarray:
    """Vorticity frames [T, N, N]; frame 0 is the initial condition."""
    n = w0.shape[0]
    if w0.shape != (n, n) or n & (n - 1):
        raise ConfigError(f"vorticity grid must be square power-of-two, got "
                          f"{w0.shape}")
    if nu <= 0:
        raise ConfigError(f"viscosity must be positive, got {nu}")
    ws = _workspace(n)
    substeps = max(1, int(round(frame_interval / dt)))
    step_dt = frame_interval / substeps
    f_hat = None if forcing is None else np.fft.fft2(forcing) * ws.dealias

    frames = np.zeros((n_frames, n, n))
    frames[0] = w0
    w_hat = np.fft.fft2(w0)
    step = 0
    for t in range(1, n_frames):
        for _ in range(substeps):
            k1 = _rhs(w_hat, ws, nu, f_hat)
            k2 = _rhs(w_hat + 0.5 * step_dt * k1, ws, nu, f_hat)
            k3 = _rhs(w_hat + 0.5 * step_dt * k2, ws, nu, f_hat)
            k4 = _rhs(w_hat + step_dt * k3, ws, nu, f_hat)
            w_hat = w_hat + (step_dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            step += 1
        w = np.fft.ifft2(w_hat).real
        if not np.all(np.isfinite(w)) or np.abs(w).max() > BLOWUP_LIMIT:
            raise SolverError(f"vorticity blow-up at solver step {step} "
                              f"(frame {t})")
        frames[t] = w
    return frames


def gen_navier_stokes(n_seq: int, t_in: int, t_out: int, n: int = 32,
                      nu: float = 1e-3, seed: int = 0,
                      frame_interval: float = 1.0, dt: float = 0.01,
                      forcing_amplitude: float = 0.1) -> SequenceBatch:
    total = t_in + t_out
    forcing = standard_forcing(n, forcing_amplitude)
    frames = np.zeros((n_seq, total, 1, n, n))
    for s in range(n_seq):
        rng = np.random.default_rng(derive_seed(seed, s))
        w0 = random_vorticity(rng, n)
        frames[s, :, 0] = simulate_vorticity(w0, total, nu, frame_interval,
                                             dt, forcing)
    meta = {"generator": "navier_stokes", "seed": str(seed), "n": str(n),
            "nu": str(nu), "forcing_amplitude": str(forcing_amplitude)}
    return SequenceBatch(frames[:, :t_in], frames[:, t_in:], meta)
