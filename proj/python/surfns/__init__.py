"""Surface Navier-Stokes finite elements on closed surfaces."""

from ._surfns import (
    ErrorReport,
    FESpace,
    HighOrderMesh,
    LevelRun,
    MeshTopology,
    RunConfig,
    Surface,
    SurfnsError,
    THSpaces,
    assemble_a_h,
    assemble_constraints,
    assemble_mass,
    build_base_mesh,
    build_taylor_hood,
    elevate_geometry,
    eoc,
    exact_velocity,
    forcing,
    geometric_errors,
    infsup_constants,
    problem_names,
    quadrature,
    run_convergence_study,
)

__all__ = [
    "ErrorReport",
    "FESpace",
    "HighOrderMesh",
    "LevelRun",
    "MeshTopology",
    "RunConfig",
    "Surface",
    "SurfnsError",
    "THSpaces",
    "assemble_a_h",
    "assemble_constraints",
    "assemble_mass",
    "build_base_mesh",
    "build_taylor_hood",
    "elevate_geometry",
    "eoc",
    "exact_velocity",
    "forcing",
    "geometric_errors",
    "infsup_constants",
    "problem_names",
    "quadrature",
    "run_convergence_study",
]
