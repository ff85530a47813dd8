"""Discrete-time optimal control: Euler paths, transversality and limit diagnostics."""

from ._core import (
    Error,
    Problem,
    cli,
    compare,
    diagnose,
    euler_residual,
    solve,
    steady_state,
    tvc,
)

__all__ = [
    "Error",
    "Problem",
    "cli",
    "compare",
    "diagnose",
    "euler_residual",
    "solve",
    "steady_state",
    "tvc",
]
