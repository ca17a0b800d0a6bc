"""Physics-guided recurrent spatiotemporal prediction.

Spectral token mixing, derivative-constrained convolutions and a gated
second-order state update on top of a self-contained float64 reverse-mode
autodiff engine, with synthetic PDE/video data generators and an
oracle-backed verification suite.
"""

__version__ = "0.1.0"

from .kernels import BACKEND as KERNEL_BACKEND  # noqa: F401
