from src.gamma_harness.harness import (
    gamma_bound_check,
    liminf_experiment,
    pointwise_uniform_check,
    random_grid_function,
    random_norm,
    random_polygonal_norm,
    recovery_experiment,
)

__all__ = [
    "gamma_bound_check", "liminf_experiment", "pointwise_uniform_check", "random_grid_function",
    "random_norm", "random_polygonal_norm", "recovery_experiment",
]
