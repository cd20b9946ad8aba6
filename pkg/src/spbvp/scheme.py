"""Fitted difference schemes with exponential (hyperbolic) coefficients.

For a mesh with steps h_j and beta = sqrt(gamma)/eps the scheme uses three
kernels of z = beta*h_j:

    a = (cosh z - 1)/sinh z = tanh(z/2)
    b = (cosh z + 1)/sinh z = coth(z/2)
    c = 1/sinh z

All of them are evaluated without forming cosh or sinh, so z may range from
~1e-10 up to 1e6 and beyond. The family parameter t in [0, 1] weighs the
nodal values of f used to approximate the reaction term on each cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

SERIES_CUTOFF = 1e-8
ROUNDING_ULPS = 4.0
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SchemeParams:
    t: float = 0.5
    gamma: float = 1.0
    eps: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.t <= 1.0:
            raise ConfigError(f"t must lie in [0, 1], got {self.t}")
        if not self.gamma > 0:
            raise ConfigError(f"gamma must be positive, got {self.gamma}")
        if not self.eps > 0:
            raise ConfigError(f"eps must be positive, got {self.eps}")

    @property
    def beta(self) -> float:
        return math.sqrt(self.gamma) / self.eps


@dataclass(frozen=True)
class Tridiagonal:
    """Tridiagonal matrix of dimension n = len(diag).

    ``sub[k]`` is entry (k+1, k) and ``sup[k]`` is entry (k, k+1).
    """

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray

    def __post_init__(self):
        sub = np.asarray(self.sub, dtype=float)
        diag = np.asarray(self.diag, dtype=float)
        sup = np.asarray(self.sup, dtype=float)
        if not (len(sub) == len(sup) == len(diag) - 1):
            raise ValueError("sub/sup must have length len(diag) - 1")
        object.__setattr__(self, "sub", sub)
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "sup", sup)

    @property
    def n(self) -> int:
        return len(self.diag)

    def matvec(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        out = self.diag * v
        out[1:] += self.sub * v[:-1]
        out[:-1] += self.sup * v[1:]
        return out

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.sub, -1) + np.diag(self.sup, 1)


def kernels(beta, h):
    """Return the kernels (a, b, c) at z = beta*h, elementwise.

    Large z gives a -> 1, b -> 1, c -> 0 without overflow (c underflows to
    exactly 0 past z ~ 745); below ``SERIES_CUTOFF`` leading-order series are
    used.
    """
    z = np.asarray(beta * np.asarray(h, dtype=float), dtype=float)
    if np.any(~(z > 0)) or np.any(np.isinf(z)):
        raise ValueError("beta*h must be positive and finite")
    small = z < SERIES_CUTOFF
    a = np.where(small, 0.5 * z, np.tanh(0.5 * z))
    b = 1.0 / a
    e = np.exp(-np.maximum(z, 1.0))
    with np.errstate(over="ignore", divide="ignore"):
        c = np.where(
            small,
            1.0 / z,
            np.where(z <= 1.0, 1.0 / np.sinh(np.minimum(z, 1.0)), 2.0 * e / (1.0 - e * e)),
        )
    if z.ndim == 0:
        return float(a), float(b), float(c)
    return a, b, c


def _cell_data(mesh, sp):
    a, b, c = kernels(sp.beta, mesh.h)
    # ((1-t) cosh z + t) / sinh z, rewritten to avoid cosh
    w = (1.0 - sp.t) * b + (2.0 * sp.t - 1.0) * c
    return a, c, w


def residual(p, mesh, sp: SchemeParams, y) -> np.ndarray:
    """Discrete operator T applied to nodal values ``y`` (length N+1).

    Boundary rows are -y_0 and -y_N; interior rows carry the normalised
    scheme, scaled by gamma / (a_{i-1} + a_i).
    """
    y = np.asarray(y, dtype=float)
    x = mesh.points
    if y.shape != x.shape:
        raise ValueError(f"y has shape {y.shape}, mesh has {x.shape}")
    t, gamma = sp.t, sp.gamma
    a, _, w = _cell_data(mesh, sp)
    f = np.asarray(p.f(x, y, sp.eps), dtype=float)

    aL, aR = a[:-1], a[1:]
    wL, wR = w[:-1], w[1:]
    ym, y0, yp = y[:-2], y[1:-1], y[2:]
    fm, f0, fp = f[:-2], f[1:-1], f[2:]

    scale = gamma / (aL + aR)
    interior = scale * (
        wL * (ym - y0)
        - wR * (y0 - yp)
        - ((1.0 - t) * fm + t * f0) / gamma * aL
        - (t * f0 + (1.0 - t) * fp) / gamma * aR
    )
    return np.concatenate(([-y[0]], interior, [-y[-1]]))


def jacobian(p, mesh, sp: SchemeParams, y) -> Tridiagonal:
    """Frechet derivative of ``residual`` at ``y``.

    The off-diagonals are assembled as scale*(c + (1-t) a (1 - f_y/gamma)),
    which is algebraically identical to the direct form but stays
    non-negative in floating point whenever gamma >= f_y.
    """
    y = np.asarray(y, dtype=float)
    x = mesh.points
    t, gamma = sp.t, sp.gamma
    a, c, w = _cell_data(mesh, sp)
    fy = np.broadcast_to(np.asarray(p.f_y(x, y, sp.eps), dtype=float), x.shape)

    aL, aR = a[:-1], a[1:]
    scale = gamma / (aL + aR)
    n = len(x)
    sub = np.zeros(n - 1)
    sup = np.zeros(n - 1)
    diag = np.full(n, -1.0)

    sub[:-1] = scale * (c[:-1] + (1.0 - t) * aL * (1.0 - fy[:-2] / gamma))
    sup[1:] = scale * (c[1:] + (1.0 - t) * aR * (1.0 - fy[2:] / gamma))
    diag[1:-1] = -scale * (w[:-1] + w[1:] + t * fy[1:-1] / gamma * (aL + aR))
    return Tridiagonal(sub=sub, diag=diag, sup=sup)


@dataclass(frozen=True)
class MMatrixReport:
    passed: bool
    margin: float
    violations: list

    def __str__(self):
        status = "pass" if self.passed else "fail"
        text = f"M-matrix check: {status}, min dominance margin {self.margin:.6g}"
        if self.violations:
            shown = "; ".join(f"row {i}: {why}" for i, why in self.violations[:5])
            more = len(self.violations) - 5
            text += f" ({shown}{f'; +{more} more' if more > 0 else ''})"
        return text


def check_m_matrix(H: Tridiagonal, m: float) -> MMatrixReport:
    """Check sign pattern and row dominance of a scheme Jacobian.

    Interior rows must have non-negative off-diagonals, a negative diagonal
    and |h_ii| - |h_i,i-1| - |h_i,i+1| >= m. The margin test allows a
    relative 1e-10 plus the rounding error of the subtraction itself (a few
    ulps of the row's absolute sum, which reaches ~1e8 for tiny beta*h). An
    off-diagonal that underflowed to exactly zero is not a violation.
    """
    n = H.n
    rows = np.arange(1, n - 1)
    lower = H.sub[rows - 1]
    upper = H.sup[rows]
    diag = H.diag[rows]
    margins = np.abs(diag) - np.abs(lower) - np.abs(upper)
    slack = m * 1e-10 + ROUNDING_ULPS * _EPS * (np.abs(diag) + np.abs(lower) + np.abs(upper))
    short = ~(margins >= m - slack)

    bad = (lower < 0) | (upper < 0) | (diag >= 0) | short
    violations = []
    for k in np.flatnonzero(bad):
        i, lo, up, d, mg = int(rows[k]), lower[k], upper[k], diag[k], margins[k]
        if not lo >= 0:
            violations.append((i, f"sub-diagonal {lo:.3e} < 0"))
        if not up >= 0:
            violations.append((i, f"super-diagonal {up:.3e} < 0"))
        if not d < 0:
            violations.append((i, f"diagonal {d:.3e} >= 0"))
        if short[k]:
            violations.append((i, f"dominance margin {mg:.6g} < m = {m:g}"))
    margin = float(margins.min()) if len(margins) else float("inf")
    return MMatrixReport(passed=not violations, margin=margin, violations=violations)
