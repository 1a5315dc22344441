"""Regularized learning from generalized data.

Datasets, solutions and configs are plain dicts in the same JSON layout the
command-line tool reads and writes.
"""

from ._core import (
    CapabilityError,
    ConvergenceError,
    GenlearnError,
    InvalidInput,
    IOError,
    NumericalError,
    boundary_grid,
    builtin_dataset,
    builtin_names,
    dual_norm,
    empirical_risk,
    epsilon_net_size,
    eval_kernel,
    evaluate,
    gram,
    halton,
    prox,
    render_svg,
    run_experiment,
    solve,
    solve_douglas_rachford,
    solve_tikhonov,
    verify_representer,
)

__all__ = [
    "CapabilityError",
    "ConvergenceError",
    "GenlearnError",
    "InvalidInput",
    "IOError",
    "NumericalError",
    "boundary_grid",
    "builtin_dataset",
    "builtin_names",
    "dual_norm",
    "empirical_risk",
    "epsilon_net_size",
    "eval_kernel",
    "evaluate",
    "gram",
    "halton",
    "point",
    "laplacian",
    "prox",
    "render_svg",
    "run_experiment",
    "solve",
    "solve_douglas_rachford",
    "solve_tikhonov",
    "verify_representer",
]


def point(*x):
    return {"type": "point", "x": list(x)}


def laplacian(*x):
    return {"type": "op", "op": "laplacian", "x": list(x)}
