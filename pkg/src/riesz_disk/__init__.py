"""Weighted Riesz s-equilibrium measures on the unit hyperdisk in R^d."""
from .disk_solver import (EquilibriumResult, RadialDensity, disk_capacity, equilibrium_density,
                          solve_on_disk)
from .estimators import DiskEquilibrium, RingEquilibrium
from .fields import MonomialField, PointChargeField, TableField, ZeroField, parse_field
from .potential_oracle import Tolerances, VerificationReport, verify
from .radial_calculus import RadialFunction, RieszParams
from .ring_fredholm import NystromConfig, RingSolution, ring_solve
from .support_solver import classify_support, critical_height, critical_radius

__all__ = [
    "DiskEquilibrium", "EquilibriumResult", "MonomialField", "NystromConfig", "PointChargeField",
    "RadialDensity", "RadialFunction", "RieszParams", "RingEquilibrium", "RingSolution",
    "TableField", "Tolerances", "VerificationReport", "ZeroField", "classify_support",
    "critical_height", "critical_radius", "disk_capacity", "equilibrium_density",
    "parse_field", "ring_solve", "solve_on_disk", "verify",
]
