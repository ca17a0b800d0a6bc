"""Moment matrices and derivative-approximating convolution banks.

A k x k filter w has the scaled moment matrix

    M(w)[a, b] = 1/(a! b!) * sum_{u,v} w[u, v] * (u - c)^a * (v - c)^b,

c = (k-1)/2, indices from the top-left.  Driving M(w) to a one-hot target
at (i, j) makes w a finite-difference stencil for d^{i+j} / dx^i dy^j,
where x runs along rows (axis -2) and y along columns (axis -1), matching
the cross-correlation convention of conv2d.  The moment map is linear and
invertible (a tensor product of two Vandermonde systems with distinct
nodes), which gives both the exact-stencil solver and the quadratic loss.

A derivative bank holds k^2 such filters applied depthwise plus a 1x1
combination over the k^2 derivative channels, shared across data channels;
filter index f corresponds to derivative order (i, j) = divmod(f, k).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .autodiff import Tensor, conv2d, matmul, reshape, square, sub, sum_all
from .errors import ShapeError

_basis_cache: dict = {}


def moment_basis(k: int) -> np.ndarray:
    """Matrix of the moment map: rows (a,b), columns (u,v), both row-major."""
    if k % 2 == 0:
        raise ShapeError(f"moment order must be odd, got {k}")
    cached = _basis_cache.get(k)
    if cached is not None:
        return cached
    c = (k - 1) // 2
    offsets = np.arange(k) - c
    b1 = np.stack([offsets ** a / factorial(a) for a in range(k)])  # [a, u]
    basis = np.einsum("au,bv->abuv", b1, b1).reshape(k * k, k * k)
    _basis_cache[k] = basis
    return basis


@dataclass
class MomentMatrix:
    """Scaled moments of one filter; entries stay on the autodiff graph."""

    order: int
    entries: Tensor
    source: Tensor | None = None


def moment_of(filt: Tensor) -> MomentMatrix:
    if filt.ndim != 2 or filt.shape[0] != filt.shape[1]:
        raise ShapeError(f"moment_of needs a square filter, got {filt.shape}")
    k = filt.shape[0]
    basis = Tensor(moment_basis(k))
    entries = reshape(matmul(basis, reshape(filt, (k * k, 1))), (k, k))
    return MomentMatrix(k, entries, filt)


def target_moment(k: int, i: int, j: int) -> MomentMatrix:
    """One-hot moment matrix selecting the derivative of order (i, j)."""
    if k % 2 == 0:
        raise ShapeError(f"moment order must be odd, got {k}")
    if not (0 <= i < k and 0 <= j < k):
        raise ShapeError(f"target_moment indices ({i},{j}) out of range for "
                         f"order {k}")
    entries = np.zeros((k, k))
    entries[i, j] = 1.0
    return MomentMatrix(k, Tensor(entries))


def solve_exact_stencils(k: int) -> np.ndarray:
    """The k^2 filters whose moment matrices hit each one-hot target, [k^2,k,k]."""
    basis = moment_basis(k)
    det = np.linalg.det(basis)
    if abs(det) < 1e-12:
        raise np.linalg.LinAlgError("moment system unexpectedly singular")
    stencils = np.linalg.solve(basis, np.eye(k * k))  # column f solves target f
    return np.ascontiguousarray(stencils.T.reshape(k * k, k, k))


class DerivativeBank:
    """k^2 trainable stencils plus a trainable 1x1 channel combination.

    ``filters`` is stored as a conv weight [k^2, 1, k, k] so the depthwise
    pass is a plain conv2d on channel-flattened input; ``combiner`` is the
    [1, k^2, 1, 1] weight mapping derivative channels back to one channel.
    """

    def __init__(self, k: int, filters=None, combiner=None):
        if k % 2 == 0:
            raise ShapeError(f"derivative order must be odd, got {k}")
        self.order = k
        # existing Tensors are adopted as-is so externally held leaves keep
        # receiving gradients; arrays are copied into fresh leaves
        if isinstance(filters, Tensor):
            if filters.shape != (k * k, 1, k, k):
                raise ShapeError(f"filters tensor must be {(k * k, 1, k, k)}, "
                                 f"got {filters.shape}")
            self.filters = filters
        else:
            if filters is None:
                filters = np.zeros((k * k, 1, k, k))
            filters = np.asarray(filters, dtype=np.float64)
            self.filters = Tensor(filters.reshape(k * k, 1, k, k).copy(),
                                  requires_grad=True)
        if isinstance(combiner, Tensor):
            if combiner.shape != (1, k * k, 1, 1):
                raise ShapeError(f"combiner tensor must be {(1, k * k, 1, 1)}, "
                                 f"got {combiner.shape}")
            self.combiner = combiner
        else:
            if combiner is None:
                combiner = np.zeros(k * k)
            combiner = np.asarray(combiner, dtype=np.float64).reshape(k * k)
            self.combiner = Tensor(combiner.reshape(1, k * k, 1, 1).copy(),
                                   requires_grad=True)

    @classmethod
    def randn(cls, k: int, rng: np.random.Generator,
              filter_scale: float = 0.02,
              combiner_scale: float = 0.0) -> "DerivativeBank":
        filters = rng.normal(0.0, filter_scale, (k * k, 1, k, k))
        combiner = (rng.normal(0.0, combiner_scale, k * k)
                    if combiner_scale > 0 else np.zeros(k * k))
        return cls(k, filters, combiner)

    @classmethod
    def exact(cls, k: int, combiner: np.ndarray | None = None) -> "DerivativeBank":
        return cls(k, solve_exact_stencils(k), combiner)

    def parameters(self):
        return {"filters": self.filters, "combiner": self.combiner}

    def filter(self, i: int, j: int) -> Tensor:
        """View of the stencil for derivative order (i, j), as a [k,k] Tensor."""
        k = self.order
        from .autodiff import narrow
        row = narrow(self.filters, 0, i * k + j, 1)
        return reshape(row, (k, k))

    def derivative_channels(self, h: Tensor) -> Tensor:
        """The k^2 depthwise derivative estimates, [b, c*k^2, H, W].

        Channel c*k^2 + f holds filter f applied to data channel c.
        """
        b, c, height, width = self._check_field(h)
        k = self.order
        flat = reshape(h, (b * c, 1, height, width))
        derivs = conv2d(flat, self.filters, padding="same")
        return reshape(derivs, (b, c * k * k, height, width))

    def apply(self, h: Tensor) -> Tensor:
        """Depthwise derivative channels recombined with shared 1x1 weights.

        Both stages are linear and the combination is per-pixel, so they
        collapse exactly (values and gradients) into one depthwise pass
        with the combiner-weighted sum of the filters; the collapsed form
        is what runs here.
        """
        b, c, height, width = self._check_field(h)
        k = self.order
        comb_row = reshape(self.combiner, (1, k * k))
        stencil = reshape(matmul(comb_row, reshape(self.filters, (k * k, k * k))),
                          (1, 1, k, k))
        flat = reshape(h, (b * c, 1, height, width))
        out = conv2d(flat, stencil, padding="same")
        return reshape(out, (b, c, height, width))

    def _check_field(self, h: Tensor):
        if h.ndim != 4:
            raise ShapeError(f"derivative bank expects [b,c,H,W], got {h.shape}")
        b, c, height, width = h.shape
        k = self.order
        if height < k or width < k:
            raise ShapeError(f"field {height}x{width} smaller than derivative "
                             f"kernel {k}x{k}")
        return b, c, height, width

    def __call__(self, h: Tensor) -> Tensor:
        return self.apply(h)


def moment_loss(bank: DerivativeBank) -> Tensor:
    """Squared deviation of every filter's moments from its one-hot target.

    With filters stacked row-wise as W [k^2, k^2] and the moment basis B,
    the per-filter targets line up as the identity, so the loss is
    ||W B^T - I||_F^2 -- a convex quadratic in the filter weights.
    """
    k = bank.order
    w2d = reshape(bank.filters, (k * k, k * k))
    basis_t = Tensor(moment_basis(k).T)
    moments = matmul(w2d, basis_t)
    return sum_all(square(sub(moments, Tensor(np.eye(k * k)))))
