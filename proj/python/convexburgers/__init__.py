"""Periodic inviscid Burgers equation: entropy solutions and their dual description."""

import numpy as np

from ._core import (
    Error,
    burgers_K,
    conjugate_K_burgers,
    godunov,
    hopf_lax,
    optimal_values,
    random_trig,
    run_scenario,
    shock_time,
    solve_primal,
    substitute,
)

__all__ = [
    "Error",
    "burgers_K",
    "conjugate_K_burgers",
    "godunov",
    "hopf_lax",
    "nodes",
    "optimal_values",
    "random_trig",
    "run_scenario",
    "shock_time",
    "solve_primal",
    "substitute",
]


def nodes(n):
    """Grid nodes i/n, i = 0..n-1."""
    return np.arange(n) / n
