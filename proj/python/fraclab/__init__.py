"""Particle systems with fractional diffusion and their cross-diffusion limits."""

from ._fraclab import (
    Config,
    ConfigError,
    Grid,
    InteractionForce,
    KernelKind,
    ModelParams,
    MollifierFamily,
    ScalingParams,
    SolverBlowup,
    UnderResolvedError,
    bl_metric,
    derived_scales,
    empirical_char_function,
    experiment_names,
    frac_gradient,
    frac_laplacian,
    free_space_force_profile,
    h_alpha_seminorm,
    l2_norm,
    pv_frac_laplacian,
    riesz_potential,
    run_experiment,
    sample_increments,
    set_threads,
    solve_pde,
    tail_slope,
    validate_model,
    validate_scaling,
)

__all__ = [
    "Config",
    "ConfigError",
    "Grid",
    "InteractionForce",
    "KernelKind",
    "ModelParams",
    "MollifierFamily",
    "ScalingParams",
    "SolverBlowup",
    "UnderResolvedError",
    "bl_metric",
    "derived_scales",
    "empirical_char_function",
    "experiment_names",
    "frac_gradient",
    "frac_laplacian",
    "free_space_force_profile",
    "h_alpha_seminorm",
    "l2_norm",
    "pv_frac_laplacian",
    "riesz_potential",
    "run_experiment",
    "sample_increments",
    "set_threads",
    "solve_pde",
    "tail_slope",
    "validate_model",
    "validate_scaling",
]
