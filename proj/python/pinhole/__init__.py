"""Boundary-integral solver and asymptotics lab for the mixed Neumann-Robin
Laplace problem in a planar domain with one small hole."""

from pinhole._core import (  # noqa: F401
    ClosedCurve,
    ExperimentConfig,
    boundary_length,
    config_from_json,
    containment_radius,
    limit_solve,
    reconstruct,
    rescaled,
    run_sweep,
    run_verify,
    solve,
    toy_energy,
    toy_solution,
    toy_xi_linear,
    __version__,
)
