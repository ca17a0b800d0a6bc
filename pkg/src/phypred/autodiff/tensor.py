"""Dense float64 tensors with reverse-mode automatic differentiation.

The graph is a dynamic tape: every operation produces a fresh ``Tensor``
carrying references to its parent tensors and a closure (`vjp`) that maps
the gradient of the loss w.r.t. the output onto gradients w.r.t. the
parents.  ``backward`` visits the recorded nodes in reverse insertion
order, which is a valid topological order because operands always exist
before the operation that consumes them.  The tape is rebuilt on every
forward pass; nothing is retained between passes except leaf ``.grad``
buffers, which accumulate (+=) until ``zero_grad``.

Everything is float64.  Broadcasting on the public arithmetic surface is
restricted to scalar-vs-tensor; fused internal ops (bias adds, trailing-
axis broadcasts) handle the remaining shape plumbing explicitly.
"""

from __future__ import annotations

import itertools
import threading
from contextlib import contextmanager

import numpy as np

from .. import kernels
from ..errors import GraphError, NonFiniteError, ShapeError

_node_ids = itertools.count(1)
_state = threading.local()


def grad_enabled() -> bool:
    return getattr(_state, "grad_enabled", True)


@contextmanager
def no_grad():
    """Disable graph recording inside the block (forward values only)."""
    prev = grad_enabled()
    _state.grad_enabled = False
    try:
        yield
    finally:
        _state.grad_enabled = prev


class Tensor:
    """A dense float64 array, optionally tracked on the autodiff tape.

    Leaves created with ``requires_grad=True`` receive accumulated
    gradients in ``.grad`` after ``backward``.  Tensors produced by
    operations carry ``_parents``/``_vjp`` and are ordered by ``node_id``;
    untracked constants have ``node_id is None``.
    """

    __slots__ = ("data", "requires_grad", "grad", "node_id", "_parents", "_vjp")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data, dtype=np.float64)
        self.requires_grad = bool(requires_grad)
        self.grad = None
        self.node_id = next(_node_ids) if requires_grad else None
        self._parents = ()
        self._vjp = None

    @property
    def shape(self) -> tuple:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        if self.data.size != 1:
            raise ShapeError(f"item() needs a single element, got shape {self.shape}")
        return float(self.data.reshape(()))

    def zero_grad(self) -> None:
        self.grad = None

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def backward(self) -> None:
        backward(self)

    # -- arithmetic sugar ---------------------------------------------------

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return add(neg(self), other)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(self, other)

    def __truediv__(self, other):
        return div(self, other)

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)

    def sum(self):
        return sum_all(self)

    def mean(self):
        return mean_all(self)

    def reshape(self, shape):
        return reshape(self, shape)

    def transpose(self, axes):
        return transpose(self, axes)

    def __repr__(self):
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}{flag})"


def make_node(data: np.ndarray, parents, vjp) -> Tensor:
    """Wrap an operation result as a graph node.

    ``vjp(g)`` must return one gradient array (or None) per parent, in
    order.  When recording is off or no parent requires grad, the result
    is an untracked constant.
    """
    out = Tensor.__new__(Tensor)
    out.data = data
    out.grad = None
    if grad_enabled() and any(p.requires_grad for p in parents):
        out.requires_grad = True
        out.node_id = next(_node_ids)
        out._parents = tuple(parents)
        out._vjp = vjp
    else:
        out.requires_grad = False
        out.node_id = None
        out._parents = ()
        out._vjp = None
    return out


def backward(loss: Tensor) -> None:
    """Accumulate d(loss)/d(leaf) into every reachable requires_grad leaf.

    Repeated calls without ``zero_grad`` accumulate.  Visits nodes in
    exact reverse insertion order.
    """
    if loss.data.size != 1:
        raise GraphError(f"backward needs a scalar loss, got shape {loss.shape}")
    if loss.node_id is None:
        return  # constant: no tracked leaves reachable
    nodes = []
    seen = set()
    stack = [loss]
    while stack:
        t = stack.pop()
        if t.node_id is None or t.node_id in seen:
            continue
        seen.add(t.node_id)
        nodes.append(t)
        stack.extend(t._parents)
    nodes.sort(key=lambda t: t.node_id, reverse=True)

    grads = {loss.node_id: np.ones_like(loss.data)}
    for t in nodes:
        g = grads.pop(t.node_id, None)
        if g is None:
            continue
        if t._vjp is None:
            if t.requires_grad:
                if t.grad is None:
                    t.grad = np.zeros_like(t.data)
                t.grad += g
            continue
        for parent, pg in zip(t._parents, t._vjp(g)):
            if pg is None or parent.node_id is None:
                continue
            held = grads.get(parent.node_id)
            grads[parent.node_id] = pg if held is None else held + pg


def _as_scalar(x):
    """Return a python float if x is scalar-like, else None."""
    if isinstance(x, (int, float, np.number)):
        return float(x)
    if isinstance(x, np.ndarray) and x.size == 1:
        return float(x.reshape(()))
    return None


# -- elementwise arithmetic ----------------------------------------------------


def add(a: Tensor, b) -> Tensor:
    return elementwise(a, b, "add")


def sub(a: Tensor, b) -> Tensor:
    return elementwise(a, b, "sub")


def mul(a: Tensor, b) -> Tensor:
    return elementwise(a, b, "mul")


def div(a: Tensor, b) -> Tensor:
    return elementwise(a, b, "div")


def elementwise(a: Tensor, b, kind: str) -> Tensor:
    """Componentwise add/sub/mul/div; ``b`` may be a scalar or match a's shape."""
    if kind not in ("add", "sub", "mul", "div"):
        raise ValueError(f"unknown elementwise kind {kind!r}")
    if isinstance(b, Tensor) and b.size != 1:
        if b.shape != a.shape:
            raise ShapeError(
                f"elementwise {kind}: shapes {a.shape} and {b.shape} differ"
            )
        return _ew_tensor(a, b, kind)
    scalar = _as_scalar(b.data if isinstance(b, Tensor) else b)
    if scalar is None:
        raise ShapeError(f"elementwise {kind}: operand {type(b).__name__} is neither "
                         f"a scalar nor a tensor of shape {a.shape}")
    if isinstance(b, Tensor):
        return _ew_scalar_tensor(a, b, kind)
    return _ew_scalar(a, scalar, kind)


def _ew_tensor(a: Tensor, b: Tensor, kind: str) -> Tensor:
    ad, bd = a.data, b.data
    if kind == "add":
        return make_node(ad + bd, (a, b), lambda g: (g, g))
    if kind == "sub":
        return make_node(ad - bd, (a, b), lambda g: (g, -g))
    if kind == "mul":
        return make_node(ad * bd, (a, b), lambda g: (g * bd, g * ad))
    if np.any(bd == 0.0):
        raise ZeroDivisionError("elementwise div: divisor contains exact zero")
    return make_node(ad / bd, (a, b), lambda g: (g / bd, -g * ad / (bd * bd)))


def _ew_scalar(a: Tensor, s: float, kind: str) -> Tensor:
    ad = a.data
    if kind == "add":
        return make_node(ad + s, (a,), lambda g: (g,))
    if kind == "sub":
        return make_node(ad - s, (a,), lambda g: (g,))
    if kind == "mul":
        return make_node(ad * s, (a,), lambda g: (g * s,))
    if s == 0.0:
        raise ZeroDivisionError("elementwise div: division by exact zero")
    return make_node(ad / s, (a,), lambda g: (g / s,))


def _ew_scalar_tensor(a: Tensor, b: Tensor, kind: str) -> Tensor:
    """b is a one-element Tensor broadcast against a; its grad is a reduction."""
    ad = a.data
    bs = float(b.data.reshape(()))
    bshape = b.shape

    def red(g):
        return np.asarray(g.sum()).reshape(bshape)

    if kind == "add":
        return make_node(ad + bs, (a, b), lambda g: (g, red(g)))
    if kind == "sub":
        return make_node(ad - bs, (a, b), lambda g: (g, -red(g)))
    if kind == "mul":
        return make_node(ad * bs, (a, b), lambda g: (g * bs, red(g * ad)))
    if bs == 0.0:
        raise ZeroDivisionError("elementwise div: division by exact zero")
    return make_node(ad / bs, (a, b),
                     lambda g: (g / bs, -red(g * ad) / (bs * bs)))


# -- unary maps ----------------------------------------------------------------


_SIGMOID_LO = np.nextafter(0.0, 1.0)
_SIGMOID_HI = np.nextafter(1.0, 0.0)


def sigmoid(a: Tensor) -> Tensor:
    x = a.data
    t = np.exp(-np.abs(x))  # overflow-free on both tails
    y = np.where(x >= 0, 1.0 / (1.0 + t), t / (1.0 + t))
    # keep the open interval even where float64 saturates
    y = np.clip(y, _SIGMOID_LO, _SIGMOID_HI)
    return make_node(y, (a,), lambda g: (g * y * (1.0 - y),))


def tanh(a: Tensor) -> Tensor:
    y = np.tanh(a.data)
    return make_node(y, (a,), lambda g: (g * (1.0 - y * y),))


def relu(a: Tensor) -> Tensor:
    mask = a.data > 0
    return make_node(np.where(mask, a.data, 0.0), (a,), lambda g: (g * mask,))


def neg(a: Tensor) -> Tensor:
    return make_node(-a.data, (a,), lambda g: (-g,))


def square(a: Tensor) -> Tensor:
    x = a.data
    return make_node(x * x, (a,), lambda g: (2.0 * x * g,))


_UNARY = {"sigmoid": sigmoid, "tanh": tanh, "relu": relu, "neg": neg,
          "square": square}


def unary(a: Tensor, kind: str) -> Tensor:
    try:
        return _UNARY[kind](a)
    except KeyError:
        raise ValueError(f"unknown unary kind {kind!r}") from None


# -- matmul --------------------------------------------------------------------


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """2D matrix product [m,k] @ [k,n] -> [m,n]."""
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError(f"matmul needs 2D operands, got {a.shape} and {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul inner dimensions differ: {a.shape} vs {b.shape}")
    ad, bd = a.data, b.data
    return make_node(ad @ bd, (a, b),
                     lambda g: (g @ bd.T, ad.T @ g))


def bmm(a: Tensor, b: Tensor) -> Tensor:
    """Batched matmul [B,m,k] @ [B,k,n] -> [B,m,n]."""
    if a.ndim != 3 or b.ndim != 3 or a.shape[0] != b.shape[0] \
            or a.shape[2] != b.shape[1]:
        raise ShapeError(f"bmm shapes incompatible: {a.shape} vs {b.shape}")
    ad, bd = a.data, b.data
    return make_node(np.matmul(ad, bd), (a, b),
                     lambda g: (np.matmul(g, bd.swapaxes(-1, -2)),
                                np.matmul(ad.swapaxes(-1, -2), g)))


# -- reductions ----------------------------------------------------------------


def sum_all(a: Tensor) -> Tensor:
    shape = a.shape
    return make_node(np.asarray(a.data.sum()), (a,),
                     lambda g: (np.broadcast_to(g, shape).copy(),))


def mean_all(a: Tensor) -> Tensor:
    n = a.size
    shape = a.shape
    return make_node(np.asarray(a.data.mean()), (a,),
                     lambda g: (np.broadcast_to(g / n, shape).copy(),))


def sum_axes(a: Tensor, axes: tuple, keepdims: bool = False) -> Tensor:
    axes = tuple(ax % a.ndim for ax in axes)
    out = a.data.sum(axis=axes, keepdims=keepdims)
    shape = a.shape

    def vjp(g):
        gg = g
        if not keepdims:
            expand = list(shape)
            for ax in axes:
                expand[ax] = 1
            gg = g.reshape(expand)
        return (np.broadcast_to(gg, shape).copy(),)

    return make_node(out, (a,), vjp)


# -- movement ------------------------------------------------------------------


def reshape(a: Tensor, shape) -> Tensor:
    shape = tuple(shape)
    old = a.shape
    return make_node(a.data.reshape(shape), (a,),
                     lambda g: (g.reshape(old),))


def transpose(a: Tensor, axes) -> Tensor:
    axes = tuple(axes)
    inverse = tuple(np.argsort(axes))
    return make_node(np.ascontiguousarray(a.data.transpose(axes)), (a,),
                     lambda g: (g.transpose(inverse),))


def concat(parts, axis: int) -> Tensor:
    parts = list(parts)
    sizes = [p.shape[axis] for p in parts]
    out = np.concatenate([p.data for p in parts], axis=axis)
    offsets = np.cumsum([0] + sizes)

    def vjp(g):
        slicer = [slice(None)] * g.ndim
        grads = []
        for i in range(len(parts)):
            slicer[axis] = slice(offsets[i], offsets[i + 1])
            grads.append(g[tuple(slicer)])
        return tuple(grads)

    return make_node(out, tuple(parts), vjp)


def narrow(a: Tensor, axis: int, start: int, length: int) -> Tensor:
    """Contiguous slice along one axis; gradient scatters back with zero fill."""
    slicer = [slice(None)] * a.ndim
    slicer[axis] = slice(start, start + length)
    slicer = tuple(slicer)
    shape = a.shape

    def vjp(g):
        full = np.zeros(shape)
        full[slicer] = g
        return (full,)

    return make_node(np.ascontiguousarray(a.data[slicer]), (a,), vjp)


def roll2(a: Tensor, shifts: tuple, axes: tuple) -> Tensor:
    """Cyclic shift; exact inverse in the backward pass."""
    inv = tuple(-s for s in shifts)
    return make_node(np.roll(a.data, shifts, axis=axes), (a,),
                     lambda g: (np.roll(g, inv, axis=axes),))


def space_to_depth(a: Tensor, p: int) -> Tensor:
    """[b,C,H,W] -> [b,C*p*p,H/p,W/p]; channel layout (C, dy, dx), C-major."""
    b, c, h, w = a.shape
    if h % p or w % p:
        raise ShapeError(f"space_to_depth: {h}x{w} not divisible by {p}")
    out = _s2d(a.data, p)
    return make_node(out, (a,), lambda g: (_d2s(g, p),))


def depth_to_space(a: Tensor, p: int) -> Tensor:
    b, c, h, w = a.shape
    if c % (p * p):
        raise ShapeError(f"depth_to_space: {c} channels not divisible by {p * p}")
    out = _d2s(a.data, p)
    return make_node(out, (a,), lambda g: (_s2d(g, p),))


def _s2d(x: np.ndarray, p: int) -> np.ndarray:
    b, c, h, w = x.shape
    x = x.reshape(b, c, h // p, p, w // p, p)
    x = x.transpose(0, 1, 3, 5, 2, 4)
    return np.ascontiguousarray(x).reshape(b, c * p * p, h // p, w // p)


def _d2s(x: np.ndarray, p: int) -> np.ndarray:
    b, cpp, h, w = x.shape
    c = cpp // (p * p)
    x = x.reshape(b, c, p, p, h, w)
    x = x.transpose(0, 1, 4, 2, 5, 3)
    return np.ascontiguousarray(x).reshape(b, c, h * p, w * p)


# -- trailing-axis broadcasts (internal plumbing) ------------------------------


def _check_trailing(x: Tensor, k: Tensor, opname: str):
    if k.ndim > x.ndim or x.shape[x.ndim - k.ndim:] != k.shape:
        raise ShapeError(
            f"{opname}: {k.shape} does not align with trailing axes of {x.shape}"
        )
    return tuple(range(x.ndim - k.ndim))


def mul_bc(x: Tensor, k: Tensor) -> Tensor:
    """x * k with k broadcast over x's leading axes; grad(k) sums them out."""
    lead = _check_trailing(x, k, "mul_bc")
    xd, kd = x.data, k.data
    return make_node(xd * kd, (x, k),
                     lambda g: (g * kd, (g * xd).sum(axis=lead) if lead else g * xd))


def add_bc(x: Tensor, k: Tensor) -> Tensor:
    lead = _check_trailing(x, k, "add_bc")
    return make_node(x.data + k.data, (x, k),
                     lambda g: (g, g.sum(axis=lead) if lead else g))


# -- fused neural-net primitives ----------------------------------------------


def softmax_last(a: Tensor) -> Tensor:
    """Softmax along the last axis (max-shifted for stability)."""
    x = a.data
    z = x - x.max(axis=-1, keepdims=True)
    e = np.exp(z)
    y = e / e.sum(axis=-1, keepdims=True)

    def vjp(g):
        dot = (g * y).sum(axis=-1, keepdims=True)
        return ((g - dot) * y,)

    return make_node(y, (a,), vjp)


def layernorm_last(a: Tensor, gamma: Tensor, beta: Tensor,
                   eps: float = 1e-5) -> Tensor:
    """Normalize the last axis to zero mean / unit variance, then affine."""
    x = a.data
    n = x.shape[-1]
    if gamma.shape != (n,) or beta.shape != (n,):
        raise ShapeError(f"layernorm_last: affine shapes {gamma.shape}/{beta.shape} "
                         f"do not match feature size {n}")
    mu = x.mean(axis=-1, keepdims=True)
    xc = x - mu
    var = (xc * xc).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = xc * inv
    y = xhat * gamma.data + beta.data
    lead = tuple(range(x.ndim - 1))

    def vjp(g):
        gx_hat = g * gamma.data
        m1 = gx_hat.mean(axis=-1, keepdims=True)
        m2 = (gx_hat * xhat).mean(axis=-1, keepdims=True)
        dx = (gx_hat - m1 - xhat * m2) * inv
        dgamma = (g * xhat).sum(axis=lead)
        dbeta = g.sum(axis=lead)
        return (dx, dgamma, dbeta)

    return make_node(y, (a, gamma, beta), vjp)


# -- convolution ---------------------------------------------------------------


def conv2d(x: Tensor, weight: Tensor, padding: str = "same",
           bias: Tensor | None = None) -> Tensor:
    """Cross-correlation (no kernel flip) of [b,cin,H,W] with [cout,cin,kh,kw].

    ``same`` zero-pads to preserve H,W and requires odd kernels; ``valid``
    shrinks to [H-kh+1, W-kw+1].  Gradients flow to input, weight and bias.
    """
    if x.ndim != 4 or weight.ndim != 4:
        raise ShapeError(f"conv2d needs 4D input/kernel, got {x.shape} and "
                         f"{weight.shape}")
    b, cin, h, w = x.shape
    cout, kcin, kh, kw = weight.shape
    if cin != kcin:
        raise ShapeError(f"conv2d channel mismatch: input has {cin} channels, "
                         f"kernel expects {kcin}")
    if padding == "same":
        if kh % 2 == 0 or kw % 2 == 0:
            raise ShapeError(f"conv2d same-padding needs odd kernels, got "
                             f"{kh}x{kw}")
        ph, pw = (kh - 1) // 2, (kw - 1) // 2
    elif padding == "valid":
        ph = pw = 0
        if h < kh or w < kw:
            raise ShapeError(f"conv2d valid: field {h}x{w} smaller than kernel "
                             f"{kh}x{kw}")
    else:
        raise ValueError(f"unknown padding {padding!r}")

    xd, wd = x.data, weight.data
    y = kernels.conv2d_forward(xd, wd, ph, pw)
    if bias is not None:
        if bias.shape != (cout,):
            raise ShapeError(f"conv2d bias shape {bias.shape} != ({cout},)")
        y = y + bias.data[:, None, None]

    parents = (x, weight) if bias is None else (x, weight, bias)

    def vjp(g):
        gx = kernels.conv2d_backward_input(g, wd, ph, pw, xd.shape)
        gw = kernels.conv2d_backward_weight(g, xd, ph, pw, wd.shape)
        if bias is None:
            return (gx, gw)
        return (gx, gw, g.sum(axis=(0, 2, 3)))

    return make_node(y, parents, vjp)


# -- fixed linear resampling ----------------------------------------------------


def separable_map(x: Tensor, row_mat: np.ndarray, col_mat: np.ndarray) -> Tensor:
    """Apply fixed matrices to the two trailing axes: out = R @ x @ C^T."""
    out = np.einsum("ij,...jk,lk->...il", row_mat, x.data, col_mat,
                    optimize=True)

    def vjp(g):
        return (np.einsum("ij,...jk,lk->...il", row_mat.T, g, col_mat.T,
                          optimize=True),)

    return make_node(out, (x,), vjp)


def assert_finite(t: Tensor, what: str) -> Tensor:
    if not np.all(np.isfinite(t.data)):
        raise NonFiniteError(f"non-finite values in {what}")
    return t
