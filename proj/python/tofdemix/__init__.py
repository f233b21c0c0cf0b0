"""Multi-frequency AMCW time-of-flight simulation and multipath decomposition."""

from ._core import (  # noqa: F401
    SPEED_OF_LIGHT,
    ConfigError,
    DataError,
    Dictionary,
    Layer,
    MapStack,
    MeasurementCube,
    ModulationPlan,
    ReproduceConfig,
    RunResult,
    Scene,
    SolverConfig,
    SparseSolution,
    brute_force_decompose,
    build_dictionary,
    depth_to_nearest_grid_index,
    forward_vandermonde,
    four_bucket_estimate,
    grid_index_to_depth,
    load_scene,
    measure,
    omp_decompose,
    phase_of_depth,
    reproduce_experiment,
    save_scene,
    single_frequency_depth,
)

__all__ = [
    "SPEED_OF_LIGHT",
    "ConfigError",
    "DataError",
    "Dictionary",
    "Layer",
    "MapStack",
    "MeasurementCube",
    "ModulationPlan",
    "ReproduceConfig",
    "RunResult",
    "Scene",
    "SolverConfig",
    "SparseSolution",
    "brute_force_decompose",
    "build_dictionary",
    "depth_to_nearest_grid_index",
    "forward_vandermonde",
    "four_bucket_estimate",
    "grid_index_to_depth",
    "load_scene",
    "measure",
    "omp_decompose",
    "phase_of_depth",
    "reproduce_experiment",
    "save_scene",
    "single_frequency_depth",
]

__version__ = "0.1.0"
