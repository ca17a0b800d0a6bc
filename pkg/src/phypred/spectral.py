"""2D discrete Fourier transforms and learnable frequency-domain mixing.

The transform follows the unnormalized forward convention

    Z(u, v) = sum_{x, y} f(x, y) * exp(-2*pi*i*(u*x/h + v*y/w))

with the 1/(h*w) factor applied on inversion.  Power-of-two extents take an
iterative radix-2 path; other extents fall back to a cached DFT-matrix
product (fine at the grid sizes used here).  Both transforms are linear,
so their vector-Jacobian products are again transforms: the adjoint of the
forward DFT is the unnormalized inverse.

A mixing block multiplies the spectrum elementwise by a trainable complex
kernel and returns to the spatial domain.  A free kernel breaks conjugate
symmetry, so the block keeps only the real part of the inverse transform;
that projection is itself linear and differentiable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autodiff import Tensor, make_node
from .errors import NonFiniteError, ShapeError

_dft_matrices: dict = {}
_bit_reversals: dict = {}
_twiddles: dict = {}

# below this, a cached DFT-matrix product through BLAS beats staged
# butterflies (python-level stage overhead dominates at small n)
_MATRIX_PATH_MAX = 64


def _dft_matrix(n: int, sign: int) -> np.ndarray:
    key = (n, sign)
    m = _dft_matrices.get(key)
    if m is None:
        idx = np.arange(n)
        m = np.exp(sign * 2j * np.pi * np.outer(idx, idx) / n)
        _dft_matrices[key] = m
    return m


def _twiddle(length: int, sign: int) -> np.ndarray:
    key = (length, sign)
    tw = _twiddles.get(key)
    if tw is None:
        tw = np.exp(sign * 2j * np.pi * np.arange(length // 2) / length)
        _twiddles[key] = tw
    return tw


def _bit_reversal(n: int) -> np.ndarray:
    perm = _bit_reversals.get(n)
    if perm is None:
        bits = n.bit_length() - 1
        idx = np.arange(n)
        perm = np.zeros(n, dtype=np.intp)
        for _ in range(bits):
            perm = (perm << 1) | (idx & 1)
            idx >>= 1
        _bit_reversals[n] = perm
    return perm


def _fft_last(a: np.ndarray, sign: int) -> np.ndarray:
    """Unnormalized DFT along the last axis; sign -1 forward, +1 inverse.

    Power-of-two extents above the matrix-path cutoff use iterative
    radix-2 butterflies; everything else is a direct (matrix) DFT.
    """
    n = a.shape[-1]
    if n == 1:
        return a.copy()
    if n & (n - 1) or n <= _MATRIX_PATH_MAX:
        return np.ascontiguousarray(a) @ _dft_matrix(n, sign)
    a = a[..., _bit_reversal(n)]
    length = 2
    while length <= n:
        half = length // 2
        tw = _twiddle(length, sign)
        a = a.reshape(a.shape[:-1] + (n // length, length))
        even = a[..., :half]
        odd = a[..., half:] * tw
        a = np.concatenate([even + odd, even - odd], axis=-1)
        a = a.reshape(a.shape[:-2] + (n,))
        length *= 2
    return a


def _matrix_path(n: int) -> bool:
    return bool(n & (n - 1)) or n <= _MATRIX_PATH_MAX


def _fft2_raw(a: np.ndarray, sign: int) -> np.ndarray:
    """Unnormalized 2D DFT over the two trailing axes."""
    h, w = a.shape[-2], a.shape[-1]
    if _matrix_path(h) and _matrix_path(w) and h > 1 and w > 1:
        # both axes via batched gemms; the DFT matrix is symmetric, so
        # M @ A transforms rows and A @ M transforms columns
        return np.matmul(_dft_matrix(h, sign),
                         np.matmul(a, _dft_matrix(w, sign)))
    out = _fft_last(a, sign)
    out = _fft_last(out.swapaxes(-1, -2), sign)
    return out.swapaxes(-1, -2)


@dataclass
class ComplexGrid:
    """Frequency-domain value: real and imaginary parts over [..., h, w]."""

    re: Tensor
    im: Tensor

    def __post_init__(self):
        if self.re.shape != self.im.shape:
            raise ShapeError(f"ComplexGrid parts differ: {self.re.shape} vs "
                             f"{self.im.shape}")

    @property
    def h(self) -> int:
        return self.re.shape[-2]

    @property
    def w(self) -> int:
        return self.re.shape[-1]

    @property
    def shape(self) -> tuple:
        return self.re.shape

    def to_complex(self) -> np.ndarray:
        return self.re.data + 1j * self.im.data


@dataclass
class SpectralKernel:
    """Trainable complex multiplier over a [c, h, w] token spectrum."""

    re: Tensor
    im: Tensor

    def __post_init__(self):
        if self.re.shape != self.im.shape:
            raise ShapeError(f"SpectralKernel parts differ: {self.re.shape} vs "
                             f"{self.im.shape}")

    @property
    def shape(self) -> tuple:
        return self.re.shape

    @classmethod
    def identity(cls, c: int, h: int, w: int) -> "SpectralKernel":
        return cls(Tensor(np.ones((c, h, w)), requires_grad=True),
                   Tensor(np.zeros((c, h, w)), requires_grad=True))

    @classmethod
    def zeros(cls, c: int, h: int, w: int) -> "SpectralKernel":
        return cls(Tensor(np.zeros((c, h, w)), requires_grad=True),
                   Tensor(np.zeros((c, h, w)), requires_grad=True))

    @classmethod
    def randn(cls, c: int, h: int, w: int, rng: np.random.Generator,
              scale: float = 0.02) -> "SpectralKernel":
        return cls(Tensor(rng.normal(0.0, scale, (c, h, w)), requires_grad=True),
                   Tensor(rng.normal(0.0, scale, (c, h, w)), requires_grad=True))


def fft2(field: Tensor) -> ComplexGrid:
    """Forward 2D DFT of a real field over its two trailing axes."""
    if field.ndim < 2:
        raise ShapeError(f"fft2 needs at least 2 axes, got shape {field.shape}")
    if not np.all(np.isfinite(field.data)):
        raise NonFiniteError("fft2: input contains non-finite values")
    z = _fft2_raw(field.data.astype(np.complex128), -1)
    re = make_node(np.ascontiguousarray(z.real), (field,),
                   lambda g: (_fft2_raw(g.astype(np.complex128), +1).real,))
    im = make_node(np.ascontiguousarray(z.imag), (field,),
                   lambda g: (_fft2_raw(1j * g.astype(np.complex128), +1).real,))
    return ComplexGrid(re, im)


def ifft2(grid: ComplexGrid, demand_real: bool = True,
          residue_tol: float = 1e-9) -> Tensor:
    """Normalized inverse 2D DFT, returning the real part.

    With ``demand_real`` the imaginary residue must stay below
    ``residue_tol`` (it does for conjugate-symmetric spectra); a larger
    residue signals broken symmetry and raises.  Mixing blocks disable the
    check because their kernels intentionally break symmetry.
    """
    h, w = grid.h, grid.w
    scale = 1.0 / (h * w)
    z = _fft2_raw(grid.to_complex(), +1) * scale
    if demand_real:
        residue = float(np.abs(z.imag).max()) if z.size else 0.0
        if residue > residue_tol:
            raise NonFiniteError(
                f"ifft2: imaginary residue {residue:.3e} exceeds "
                f"{residue_tol:.1e}; spectrum is not conjugate-symmetric")

    def vjp(g):
        gz = _fft2_raw(g.astype(np.complex128), -1) * scale
        return (np.ascontiguousarray(gz.real), np.ascontiguousarray(gz.imag))

    return make_node(np.ascontiguousarray(z.real), (grid.re, grid.im), vjp)


def fourier_block(u: Tensor, kernel: SpectralKernel) -> Tensor:
    """Spectral mixing: real(IFFT(kernel * FFT(u))) on [b, c, h, w] tokens."""
    if u.ndim != 4:
        raise ShapeError(f"fourier_block expects [b,c,h,w], got {u.shape}")
    if kernel.shape != u.shape[1:]:
        raise ShapeError(f"fourier_block kernel shape {kernel.shape} does not "
                         f"match tokens {u.shape[1:]}")
    from .autodiff import mul_bc, sub, add

    z = fft2(u)
    re = sub(mul_bc(z.re, kernel.re), mul_bc(z.im, kernel.im))
    im = add(mul_bc(z.re, kernel.im), mul_bc(z.im, kernel.re))
    return ifft2(ComplexGrid(re, im), demand_real=False)


def stack_fourier_blocks(u: Tensor, kernels: list, depth: int) -> Tensor:
    """Sequential mixing blocks, each wrapped in a residual connection."""
    if len(kernels) != depth:
        raise ShapeError(f"stack_fourier_blocks: got {len(kernels)} kernels "
                         f"for depth {depth}")
    out = u
    for kernel in kernels:
        out = out + fourier_block(out, kernel)
    return out
