"""Python access to the polyheat core.

Run-level functions (classify, solve, delta_sweep) take a dict of config keys,
the same keys the CLI accepts in --config files and --set pairs.
"""

from ._polyheat import (
    PolyheatError,
    Profile,
    classify,
    config_hash,
    config_keys,
    delta_sweep,
    derivative_bound_check,
    eta,
    eta_derivative,
    eta_star,
    kernel_profile,
    majorant_constants,
    normalized_config,
    semigroup_residual,
    solve,
)

__all__ = [
    "PolyheatError",
    "Profile",
    "classify",
    "config_hash",
    "config_keys",
    "delta_sweep",
    "derivative_bound_check",
    "eta",
    "eta_derivative",
    "eta_star",
    "kernel_profile",
    "majorant_constants",
    "normalized_config",
    "semigroup_residual",
    "solve",
]
