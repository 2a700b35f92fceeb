"""Variational periodic and connecting orbits of the planar Sitnikov problem."""

from ._core import (
    Grid,
    KeplerDrive,
    PeriodicOrbit,
    Trajectory,
    action_gradient,
    action_value,
    admissible,
    block_lengths,
    connect,
    el_residual_sup,
    in_m,
    in_s,
    lagrangian,
    minimize_periodic,
    periodic_orbit_from_json,
    rho,
    seed_periodic,
    verify_periodic,
)

__version__ = "0.1.0"

__all__ = [
    "Grid",
    "KeplerDrive",
    "PeriodicOrbit",
    "Trajectory",
    "action_gradient",
    "action_value",
    "admissible",
    "block_lengths",
    "connect",
    "el_residual_sup",
    "in_m",
    "in_s",
    "lagrangian",
    "minimize_periodic",
    "periodic_orbit_from_json",
    "rho",
    "seed_periodic",
    "verify_periodic",
]
