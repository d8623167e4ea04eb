"""Energy-efficient RB and power allocation for H-CRAN downlinks."""

from ._core import (
    RNG,
    ConfigError,
    Error,
    InfeasibleError,
    ScenarioConfig,
    __version__,
    channel,
    figure_config,
    path_loss_db,
    run_config,
    run_figure,
    solve_snapshot,
    tiny_check,
    verify,
)

__all__ = [
    "RNG",
    "ConfigError",
    "Error",
    "InfeasibleError",
    "ScenarioConfig",
    "channel",
    "figure_config",
    "path_loss_db",
    "run_config",
    "run_figure",
    "solve_snapshot",
    "tiny_check",
    "verify",
]
