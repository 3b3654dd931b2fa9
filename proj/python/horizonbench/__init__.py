"""Multi-step-ahead time series prediction benchmark.

Thin Python surface over the native core: chaotic series generation,
state-space reconstruction, the seven benchmark models with exact-gradient
training, and the multi-seed experiment runner.
"""

from horizonbench._core import (
    Model,
    aggregate,
    build_model,
    embed,
    fit_scale,
    generate,
    inverse_scale,
    load_checkpoint,
    load_csv,
    model_kinds,
    rmse_per_horizon,
    run_experiment,
    simulated_systems,
    spearman_rho,
    student_t_ppf,
    train,
    train_test_split,
)

__all__ = [
    "Model",
    "aggregate",
    "build_model",
    "embed",
    "fit_scale",
    "generate",
    "inverse_scale",
    "load_checkpoint",
    "load_csv",
    "model_kinds",
    "rmse_per_horizon",
    "run_experiment",
    "simulated_systems",
    "spearman_rho",
    "student_t_ppf",
    "train",
    "train_test_split",
]

__version__ = "0.1.0"
