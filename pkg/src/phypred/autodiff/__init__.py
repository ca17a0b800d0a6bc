"""Reverse-mode autodiff engine on dense float64 arrays."""

from .gradcheck import GradCheckReport, check_gradient, check_parameter_gradient
from .tensor import (
    Tensor,
    add,
    add_bc,
    assert_finite,
    backward,
    bmm,
    concat,
    conv2d,
    depth_to_space,
    div,
    elementwise,
    grad_enabled,
    layernorm_last,
    make_node,
    matmul,
    mean_all,
    mul,
    mul_bc,
    narrow,
    neg,
    no_grad,
    relu,
    reshape,
    roll2,
    separable_map,
    sigmoid,
    softmax_last,
    space_to_depth,
    square,
    sub,
    sum_all,
    sum_axes,
    tanh,
    transpose,
    unary,
)

__all__ = [
    "GradCheckReport", "Tensor", "add", "add_bc", "assert_finite", "backward",
    "bmm", "check_gradient", "check_parameter_gradient", "concat", "conv2d",
    "depth_to_space", "div",
    "elementwise", "grad_enabled", "layernorm_last", "make_node", "matmul",
    "mean_all", "mul", "mul_bc", "narrow", "neg", "no_grad", "relu",
    "reshape", "roll2", "separable_map", "sigmoid", "softmax_last",
    "space_to_depth", "square", "sub", "sum_all", "sum_axes", "tanh",
    "transpose", "unary",
]
