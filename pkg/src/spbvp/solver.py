"""Newton iteration for T(y) = 0 with a tridiagonal (Thomas) linear solve."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import ConfigError, ConvergenceError, SingularSystemError, StabilityError
from .mesh import Mesh
from .scheme import MMatrixReport, SchemeParams, Tridiagonal, check_m_matrix, jacobian, residual

log = logging.getLogger(__name__)

_TINY = np.finfo(float).tiny


def thomas_solve(H: Tridiagonal, rhs) -> np.ndarray:
    """Solve ``H @ x = rhs`` by forward elimination and back substitution.

    No pivoting is done, which is safe for the diagonally dominant systems
    produced here. A zero or subnormal pivot raises ``SingularSystemError``.
    """
    d = np.asarray(rhs, dtype=float)
    n = H.n
    if d.shape != (n,):
        raise ValueError(f"rhs has shape {d.shape}, matrix has dimension {n}")
    sub = H.sub.tolist()
    diag = H.diag.tolist()
    sup = H.sup.tolist()
    d = d.tolist()

    cp = [0.0] * n
    dp = [0.0] * n
    piv = diag[0]
    if not abs(piv) >= _TINY:
        raise SingularSystemError("zero pivot in row 0")
    cp[0] = sup[0] / piv if n > 1 else 0.0
    dp[0] = d[0] / piv
    for i in range(1, n):
        piv = diag[i] - sub[i - 1] * cp[i - 1]
        if not abs(piv) >= _TINY:
            raise SingularSystemError(f"zero pivot in row {i}")
        if i < n - 1:
            cp[i] = sup[i] / piv
        dp[i] = (d[i] - sub[i - 1] * dp[i - 1]) / piv

    x = dp
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return np.array(x)


@dataclass(frozen=True)
class SolverConfig:
    """Newton settings.

    ``tol`` bounds the max-norm of the Newton correction. With ``strict``
    the Jacobian is checked for the M-matrix property (and gamma >= f_y at
    the nodes) at every iterate. ``line_search`` enables step halving when
    the residual grows.
    """

    tol: float = 1e-10
    max_iterations: int = 50
    initial_value: Union[float, Sequence[float]] = 0.0
    strict: bool = False
    line_search: bool = False

    def __post_init__(self):
        if not self.tol > 0:
            raise ConfigError(f"tol must be positive, got {self.tol}")
        if self.max_iterations < 1:
            raise ConfigError(f"max_iterations must be at least 1, got {self.max_iterations}")


@dataclass
class DiscreteSolution:
    mesh: Mesh
    values: np.ndarray
    iterations: int
    final_correction: float
    converged: bool
    params: SchemeParams
    corrections: list = field(default_factory=list)
    m_matrix_reports: list = field(default_factory=list)

    @property
    def x(self) -> np.ndarray:
        return self.mesh.points


def _initial_guess(mesh: Mesh, init) -> np.ndarray:
    if np.ndim(init) == 0:
        y = np.full(mesh.N + 1, float(init))
    else:
        y = np.array(init, dtype=float)
        if y.shape != (mesh.N + 1,):
            raise ConfigError(f"initial sequence must have length {mesh.N + 1}, got {y.shape}")
    y[0] = y[-1] = 0.0
    return y


def _stability_check(p, mesh, sp, y, H) -> MMatrixReport:
    report = check_m_matrix(H, p.m)
    fy_max = float(np.max(p.f_y(mesh.points, y, sp.eps)))
    if fy_max > sp.gamma * (1.0 + 1e-12):
        raise StabilityError(f"gamma = {sp.gamma:g} is below max f_y = {fy_max:g} on the current iterate", report)
    if not report.passed:
        raise StabilityError(str(report), report)
    return report


def newton_solve(p, mesh: Mesh, sp: SchemeParams, cfg: SolverConfig = SolverConfig()) -> DiscreteSolution:
    """Solve the discrete problem T(y) = 0 by undamped Newton iteration.

    Returns a ``DiscreteSolution`` whose ``converged`` flag reports whether
    the correction norm dropped below ``cfg.tol`` within
    ``cfg.max_iterations`` steps.

    Raises
    ------
    StabilityError
        In strict mode, when an iterate's Jacobian is not an M-matrix.
    SingularSystemError
        When the Jacobian cannot be factored.
    ConvergenceError
        When the iterates stop being finite.
    """
    y = _initial_guess(mesh, cfg.initial_value)
    corrections = []
    reports = []
    converged = False
    norm = float("inf")
    r = residual(p, mesh, sp, y)

    for _ in range(cfg.max_iterations):
        H = jacobian(p, mesh, sp, y)
        if cfg.strict:
            reports.append(_stability_check(p, mesh, sp, y, H))
        delta = thomas_solve(H, r)
        step = 1.0
        y_new = y - delta
        y_new[0] = y_new[-1] = 0.0
        r_new = residual(p, mesh, sp, y_new)
        if cfg.line_search:
            rnorm = np.max(np.abs(r))
            while np.max(np.abs(r_new)) > rnorm and step > 2.0**-20:
                step *= 0.5
                y_new = y - step * delta
                y_new[0] = y_new[-1] = 0.0
                r_new = residual(p, mesh, sp, y_new)
        y, r = y_new, r_new
        norm = float(np.max(np.abs(step * delta)))
        corrections.append(norm)
        if not np.all(np.isfinite(y)):
            raise ConvergenceError(f"Newton iterates became non-finite after {len(corrections)} steps")
        if norm <= cfg.tol:
            converged = True
            break

    if not converged:
        log.warning("Newton did not converge in %d iterations (last correction %.3e)", cfg.max_iterations, norm)
    if cfg.strict and converged:
        reports.append(_stability_check(p, mesh, sp, y, jacobian(p, mesh, sp, y)))
    return DiscreteSolution(
        mesh=mesh,
        values=y,
        iterations=len(corrections),
        final_correction=norm,
        converged=converged,
        params=sp,
        corrections=corrections,
        m_matrix_reports=reports,
    )
