"""Boundary spike layers for -d Lap u + u = u (e^{u^2} - 1) with Neumann data in 2-D."""

from ._core import (
    Mesh,
    RadialProfile,
    SpikeError,
    decay_rate,
    disk_mesh,
    disk_symmetry,
    energy_I,
    gamma_constant,
    moser_sharpness,
    moser_value,
    nehari_identity,
    pohozaev_checks,
    read_profile,
    shoot_ground_state,
    solve,
    sweep,
    write_profile,
)

__all__ = [
    "Mesh",
    "RadialProfile",
    "SpikeError",
    "decay_rate",
    "disk_mesh",
    "disk_symmetry",
    "energy_I",
    "gamma_constant",
    "moser_sharpness",
    "moser_value",
    "nehari_identity",
    "pohozaev_checks",
    "read_profile",
    "shoot_ground_state",
    "solve",
    "sweep",
    "write_profile",
]
