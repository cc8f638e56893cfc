from .laplace import (
    DomainSpec2D,
    Inclusion,
    NonConvergenceError,
    PotentialGrid,
    ceiling_holding_profile,
    dep_force_map,
    solve_laplace,
)

__all__ = [
    "DomainSpec2D",
    "Inclusion",
    "NonConvergenceError",
    "PotentialGrid",
    "ceiling_holding_profile",
    "dep_force_map",
    "solve_laplace",
]
