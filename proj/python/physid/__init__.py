"""Physical parameter identification from observed trajectories."""

from ._physid import (
    ArityError,
    CalibrationError,
    DivergenceError,
    DomainError,
    IllPosedError,
    ParseError,
    PhysidError,
    Trajectory,
    UnsupportedError,
    cli,
    confusion,
    corrected_length,
    direct_fit,
    elliptic_k,
    exact_period,
    fit,
    friction_from_accel,
    latent_to_si,
    mae,
    ode_residual,
    param_names,
    preset_clip,
    preset_names,
    rollout,
    select_family,
    small_angle_period,
)

__all__ = [
    "ArityError",
    "CalibrationError",
    "DivergenceError",
    "DomainError",
    "IllPosedError",
    "ParseError",
    "PhysidError",
    "Trajectory",
    "UnsupportedError",
    "cli",
    "confusion",
    "corrected_length",
    "direct_fit",
    "elliptic_k",
    "exact_period",
    "fit",
    "friction_from_accel",
    "latent_to_si",
    "mae",
    "ode_residual",
    "param_names",
    "preset_clip",
    "preset_names",
    "rollout",
    "select_family",
    "small_angle_period",
]
