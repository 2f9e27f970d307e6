"""Single-photon LiDAR simulation, signal extraction and depth estimation."""

from ._core import (
    AcquisitionParams,
    CensoredCube,
    ConfigError,
    PipelineResult,
    Scene,
    SweepRow,
    TimestampCube,
    blocks_scene,
    configure_for_targets,
    count_split,
    pml_depth,
    predictor,
    rmse,
    run_filter,
    run_pipeline,
    simulate_pixel,
    simulate_scene,
    sweep,
    toy_scene,
)

__all__ = [
    "AcquisitionParams",
    "CensoredCube",
    "ConfigError",
    "PipelineResult",
    "Scene",
    "SweepRow",
    "TimestampCube",
    "blocks_scene",
    "configure_for_targets",
    "count_split",
    "pml_depth",
    "predictor",
    "rmse",
    "run_filter",
    "run_pipeline",
    "simulate_pixel",
    "simulate_scene",
    "sweep",
    "toy_scene",
]
