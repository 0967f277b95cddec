"""Load-frequency control simulations and checks (C++ core)."""

from ._core import (
    ConfigError,
    InfeasibleError,
    check_solvability,
    default_config,
    format_config,
    optimal_dispatch,
    simulate,
)

__all__ = [
    "ConfigError",
    "InfeasibleError",
    "check_solvability",
    "default_config",
    "format_config",
    "optimal_dispatch",
    "simulate",
]
