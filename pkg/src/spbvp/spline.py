"""Global solutions on [0, 1] built from nodal values.

Two interpolants are provided: the piecewise-linear one and the natural
cubic spline written in terms of its moments M_i = C''(x_i). Interval
lengths follow h_i = x_{i+1} - x_i throughout.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .scheme import Tridiagonal
from .solver import thomas_solve


@dataclass(frozen=True)
class GlobalSolution:
    kind: str
    knots: np.ndarray
    values: np.ndarray
    moments: Optional[np.ndarray] = None

    def __call__(self, x):
        return eval_global(self, x)


def _nodes(sol):
    if hasattr(sol, "mesh"):
        return np.asarray(sol.mesh.points, dtype=float), np.asarray(sol.values, dtype=float)
    x, y = sol
    return np.asarray(x, dtype=float), np.asarray(y, dtype=float)


def linear_spline(sol) -> GlobalSolution:
    """Piecewise-linear interpolant of a ``DiscreteSolution`` (or an (x, y) pair)."""
    x, y = _nodes(sol)
    if len(x) < 2:
        raise ValueError("need at least two knots")
    return GlobalSolution(kind="linear", knots=x, values=y)


def moment_system(x, y):
    """Tridiagonal system whose solution is the natural spline's moments.

    Rows 0 and N pin M_0 = M_N = 0; interior rows read
    h_{i-1}/6 M_{i-1} + (h_{i-1}+h_i)/3 M_i + h_i/6 M_{i+1}
    = (y_{i+1}-y_i)/h_i - (y_i-y_{i-1})/h_{i-1}.
    """
    h = np.diff(x)
    n = len(x)
    sub = np.zeros(n - 1)
    sup = np.zeros(n - 1)
    diag = np.ones(n)
    rhs = np.zeros(n)
    sub[:-1] = h[:-1] / 6.0
    diag[1:-1] = (h[:-1] + h[1:]) / 3.0
    sup[1:] = h[1:] / 6.0
    slopes = np.diff(y) / h
    rhs[1:-1] = slopes[1:] - slopes[:-1]
    return Tridiagonal(sub=sub, diag=diag, sup=sup), rhs


def cubic_moments(sol) -> np.ndarray:
    x, y = _nodes(sol)
    if len(x) < 3:
        raise ValueError("need N >= 2 intervals for a cubic spline")
    H, rhs = moment_system(x, y)
    M = thomas_solve(H, rhs)
    M[0] = M[-1] = 0.0
    return M


def cubic_spline(sol) -> GlobalSolution:
    x, y = _nodes(sol)
    return GlobalSolution(kind="cubic", knots=x, values=y, moments=cubic_moments((x, y)))


def eval_piece(g: GlobalSolution, i, x, nu: int = 0):
    """Evaluate the ``nu``-th derivative of piece ``i`` (on [x_i, x_{i+1}]) at ``x``.

    No interval search is done; ``x`` may lie outside the piece.
    """
    i = np.asarray(i)
    x = np.asarray(x, dtype=float)
    xl, xr = g.knots[i], g.knots[i + 1]
    yl, yr = g.values[i], g.values[i + 1]
    h = xr - xl
    if g.kind == "linear":
        if nu == 0:
            w = (x - xl) / h  # exactly 0 and 1 at the knots
            return (1.0 - w) * yl + w * yr
        return (yr - yl) / h if nu == 1 else np.zeros_like(x)

    Ml, Mr = g.moments[i], g.moments[i + 1]
    u, v = xr - x, x - xl
    lin = (yr - yl) / h - h / 6.0 * (Mr - Ml)
    # explicit products keep scalar and array evaluation bit-identical
    if nu == 0:
        return Ml * (u * u * u) / (6.0 * h) + Mr * (v * v * v) / (6.0 * h) + lin * v + yl - Ml * (h * h) / 6.0
    if nu == 1:
        return -Ml * (u * u) / (2.0 * h) + Mr * (v * v) / (2.0 * h) + lin
    if nu == 2:
        return (Ml * u + Mr * v) / h
    return (Mr - Ml) / h * np.ones_like(x)


def locate(knots, x):
    """Index of the piece containing ``x``; interior knots go to the piece on their left."""
    idx = np.searchsorted(knots, x, side="left") - 1
    return np.clip(idx, 0, len(knots) - 2)


def eval_global(g: GlobalSolution, x):
    x_arr = np.asarray(x, dtype=float)
    if np.any((x_arr < 0.0) | (x_arr > 1.0)) or np.any(np.isnan(x_arr)):
        raise ValueError("x must lie in [0, 1]")
    out = eval_piece(g, locate(g.knots, x_arr), x_arr)
    return float(out) if np.ndim(out) == 0 else out


def dense_grid(knots, samples_per_interval: int = 10) -> np.ndarray:
    """``samples_per_interval`` equispaced points per interval (left end included) plus x_N."""
    if samples_per_interval < 1:
        raise ValueError("samples_per_interval must be at least 1")
    s = np.arange(samples_per_interval) / samples_per_interval
    h = np.diff(knots)
    pts = (knots[:-1, None] + h[:, None] * s[None, :]).ravel()
    return np.append(pts, knots[-1])


def global_error(g: GlobalSolution, p, eps: float, samples_per_interval: int = 10) -> float:
    """Max-norm distance between ``g`` and the exact solution on the dense grid."""
    if p.exact is None:
        raise ValueError(f"problem {p.name!r} has no exact solution")
    xs = dense_grid(g.knots, samples_per_interval)
    return float(np.max(np.abs(eval_global(g, xs) - p.exact(xs, eps))))


def write_dense_csv(g: GlobalSolution, fh, p=None, eps=None, samples_per_interval: int = 10) -> None:
    """Write ``x,P,exact,abs_err``; the last two columns stay empty without an exact solution."""
    xs = dense_grid(g.knots, samples_per_interval)
    vals = eval_global(g, xs)
    exact = p.exact(xs, eps) if p is not None and p.exact is not None else None
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["x", "P", "exact", "abs_err"])
    for k, (x, v) in enumerate(zip(xs, vals)):
        if exact is None:
            writer.writerow([repr(float(x)), repr(float(v)), "", ""])
        else:
            writer.writerow([repr(float(x)), repr(float(v)), repr(float(exact[k])), repr(float(abs(v - exact[k])))])
