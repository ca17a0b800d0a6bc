"""Synthetic sequence generators, numerical solvers, and tensor file I/O."""

from .advection import (
    advection_diffusion_rhs,
    gen_advection_diffusion,
    simulate_advection,
    smooth_random_field,
)
from .blobs import blob_positions, gen_bouncing_blobs, render_blobs
from .dataset import (
    SequenceBatch,
    derive_seed,
    load_split,
    persistence_baseline,
    save_split,
)
from .navier_stokes import (
    gen_navier_stokes,
    random_vorticity,
    simulate_vorticity,
    standard_forcing,
)
from .tensorfile import read_tensor_file, write_tensor_file

__all__ = [
    "SequenceBatch", "advection_diffusion_rhs", "blob_positions",
    "derive_seed", "gen_advection_diffusion", "gen_bouncing_blobs",
    "gen_navier_stokes", "load_split", "persistence_baseline",
    "random_vorticity", "read_tensor_file", "render_blobs", "save_split",
    "simulate_advection", "simulate_vorticity", "smooth_random_field",
    "write_tensor_file",
]
