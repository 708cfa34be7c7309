"""Vora-Value evaluation and colorimetric filter design."""

from ._core import (
    SensorSet,
    VoraError,
    WavelengthGrid,
    filtered_vora_value,
    gaussian_camera,
    gradient,
    gradient_in_basis,
    hessian,
    load_sensor_set,
    make_basis,
    newton_step,
    optimize,
    parse_spectral_csv,
    project_to_box,
    reference_gaussian_camera,
    regularized_objective,
    resample_to_grid,
    vora_value,
)

__all__ = [
    "SensorSet",
    "VoraError",
    "WavelengthGrid",
    "filtered_vora_value",
    "gaussian_camera",
    "gradient",
    "gradient_in_basis",
    "hessian",
    "load_sensor_set",
    "make_basis",
    "newton_step",
    "optimize",
    "parse_spectral_csv",
    "project_to_box",
    "reference_gaussian_camera",
    "regularized_objective",
    "resample_to_grid",
    "vora_value",
]
