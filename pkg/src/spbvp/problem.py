"""Boundary-value problems of the form eps^2 y'' = f(x, y), y(0) = y(1) = 0."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

Evaluator = Callable[[np.ndarray, np.ndarray, float], np.ndarray]
ExactSolution = Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class Problem:
    """A semilinear reaction-diffusion problem with homogeneous Dirichlet data.

    ``f`` and ``f_y`` are called as ``f(x, y, eps)`` and must accept numpy
    arrays. ``m`` is the positive lower bound of ``f_y``; ``exact`` is
    ``exact(x, eps)`` when a closed form is known.
    """

    name: str
    f: Evaluator
    f_y: Evaluator
    m: float
    gamma_default: float = 1.0
    exact: Optional[ExactSolution] = None

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError(f"m must be positive, got {self.m}")
        if not self.gamma_default > 0:
            raise ValueError(f"gamma_default must be positive, got {self.gamma_default}")


def _check_domain(x):
    x = np.asarray(x, dtype=float)
    if np.any((x < 0.0) | (x > 1.0)) or np.any(np.isnan(x)):
        raise ValueError("x must lie in [0, 1]")
    return x


def eval_f(p: Problem, eps: float, x, y):
    """Evaluate the reaction term of ``p`` with ``eps`` bound."""
    x = _check_domain(x)
    out = p.f(x, np.asarray(y, dtype=float), eps)
    return float(out) if np.ndim(out) == 0 else out


def eval_exact(p: Problem, eps: float, x):
    if p.exact is None:
        raise ValueError(f"problem {p.name!r} has no exact solution")
    x = _check_domain(x)
    out = p.exact(x, eps)
    return float(out) if np.ndim(out) == 0 else out


def _example1_f(x, y, eps):
    return y + np.cos(np.pi * x) ** 2 + 2.0 * eps**2 * np.pi**2 * np.cos(2.0 * np.pi * x)


def _example1_f_y(x, y, eps):
    return np.ones(np.broadcast(x, y).shape)


def _example1_exact(x, eps):
    # exponents are non-positive on [0, 1], so nothing overflows
    layer = (np.exp(-x / eps) + np.exp(-(1.0 - x) / eps)) / (1.0 + np.exp(-1.0 / eps))
    return layer - np.cos(np.pi * x) ** 2


def make_builtin_example1() -> Problem:
    """The test problem with two exponential boundary layers.

    f(x, y) = y + cos^2(pi x) + 2 eps^2 pi^2 cos(2 pi x), with exact solution
    (exp(-x/eps) + exp(-(1-x)/eps)) / (1 + exp(-1/eps)) - cos^2(pi x).
    """
    return Problem(
        name="builtin:example1",
        f=_example1_f,
        f_y=_example1_f_y,
        m=1.0,
        gamma_default=1.0,
        exact=_example1_exact,
    )


BUILTIN_PROBLEMS = {"builtin:example1": make_builtin_example1}


def get_problem(name: str) -> Problem:
    try:
        return BUILTIN_PROBLEMS[name]()
    except KeyError:
        known = ", ".join(sorted(BUILTIN_PROBLEMS))
        raise ValueError(f"unknown problem {name!r} (known: {known})") from None
