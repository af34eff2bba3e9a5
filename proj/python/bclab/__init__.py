"""Python surface of the boundary-controlled evolution laboratory."""

from ._bclab import (
    ControlSignal,
    DiscreteGreenSystem,
    Grid,
    InvalidArgument,
    SelfAdjointExtension,
    build_dirac,
    deficiency_indices,
    extend_self_adjoint,
    green_residual,
    propagate,
    solve_bc_direct,
    transport_oracle,
)

__all__ = [
    "ControlSignal",
    "DiscreteGreenSystem",
    "Grid",
    "InvalidArgument",
    "SelfAdjointExtension",
    "build_dirac",
    "deficiency_indices",
    "extend_self_adjoint",
    "green_residual",
    "propagate",
    "solve_bc_direct",
    "transport_oracle",
]
