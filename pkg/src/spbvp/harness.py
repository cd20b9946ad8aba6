"""Error/order tables over eps x N sweeps."""

from __future__ import annotations

import csv
import dataclasses
import io
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .errors import ConfigError, ConvergenceError, SingularSystemError, StabilityError
from .mesh import build_mesh
from .scheme import SchemeParams
from .solver import DiscreteSolution, SolverConfig, newton_solve
from .spline import cubic_spline, global_error, linear_spline

log = logging.getLogger(__name__)

SHISHKIN_TYPE = ("shishkin", "shishkin-mod")
CSV_HEADER = ["mesh", "eps", "N", "E_N", "Ord", "iters"]


def discrete_error(sol: DiscreteSolution, p, eps: float) -> float:
    """Max over the mesh nodes of |y(x_i) - y_i|."""
    if p.exact is None:
        raise ValueError(f"problem {p.name!r} has no exact solution")
    x = sol.mesh.points
    return float(np.max(np.abs(p.exact(x, eps) - np.asarray(sol.values))))


def conv_order(E_N: float, E_2N: float, k: int, kind: str) -> Optional[float]:
    """Observed order between N = 2^k and 2N; ``None`` when undefined.

    Shishkin-type meshes divide by ln(2k/(k+1)) to absorb the ln^2 N
    factor of their error bound, the others by ln 2.
    """
    if E_N is None or E_2N is None or not (E_N > 0 and E_2N > 0) or k < 2:
        return None
    if not (math.isfinite(E_N) and math.isfinite(E_2N)):
        return None
    denom = math.log(2.0 * k / (k + 1.0)) if kind in SHISHKIN_TYPE else math.log(2.0)
    return (math.log(E_N) - math.log(E_2N)) / denom


@dataclass
class ConvergenceRow:
    mesh: str
    eps: float
    N: int
    E_N: Optional[float] = None
    Ord: Optional[float] = None
    iters: Optional[int] = None
    global_E_N: Optional[float] = None
    error: Optional[str] = None


@dataclass
class ConvergenceReport:
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def block(self, kind: str, eps: float) -> list:
        return [r for r in self.rows if r.mesh == kind and r.eps == eps]

    def extend(self, other: "ConvergenceReport") -> None:
        self.rows.extend(other.rows)
        for key, val in other.metadata.items():
            self.metadata.setdefault(key, val)


def run_convergence(
    p,
    kind: str,
    k_range: Iterable[int],
    eps_list: Iterable[float],
    sp: SchemeParams = SchemeParams(),
    cfg: SolverConfig = SolverConfig(),
    sample_density: Optional[int] = None,
    global_kind: Optional[str] = None,
    mesh_overrides: Optional[dict] = None,
) -> ConvergenceReport:
    """Solve on N = 2^k for every eps and tabulate E_N and Ord.

    Rows are ordered eps-major, N-minor. A failed solve is recorded in the
    row's ``error`` field and the sweep moves on. When ``global_kind`` is
    'linear' or 'cubic' the dense-sampled spline error is added as
    ``global_E_N``.
    """
    if p.exact is None:
        raise ValueError(f"problem {p.name!r} has no exact solution")
    ks = sorted(set(int(k) for k in k_range))
    if global_kind not in (None, "none", "linear", "cubic"):
        raise ConfigError(f"unknown spline kind {global_kind!r}")
    if global_kind == "none":
        global_kind = None
    density = sample_density or 10

    report = ConvergenceReport(
        metadata={
            "problem": p.name,
            "t": sp.t,
            "gamma": sp.gamma,
            "tol": cfg.tol,
            "max_iterations": cfg.max_iterations,
            "initial_value": cfg.initial_value,
            "global": global_kind or "none",
            "samples_per_interval": density if global_kind else None,
            "mesh_overrides": dict(mesh_overrides or {}),
        }
    )
    for eps in eps_list:
        eps = float(eps)
        rows = {}
        for k in ks:
            N = 2**k
            row = ConvergenceRow(mesh=kind, eps=eps, N=N)
            try:
                mesh = build_mesh(kind, N, eps, p.m, mesh_overrides)
                sol = newton_solve(p, mesh, dataclasses.replace(sp, eps=eps), cfg)
                row.iters = sol.iterations
                if not sol.converged:
                    row.error = f"Newton did not converge ({sol.final_correction:.2e})"
                else:
                    row.E_N = discrete_error(sol, p, eps)
                    if global_kind:
                        g = linear_spline(sol) if global_kind == "linear" else cubic_spline(sol)
                        row.global_E_N = global_error(g, p, eps, density)
            except (ConfigError, StabilityError, SingularSystemError, ConvergenceError) as exc:
                row.error = f"{type(exc).__name__}: {exc}"
            if row.error:
                log.warning("%s eps=%s N=%d failed: %s", kind, format_eps(eps), N, row.error)
            rows[k] = row
        for k in ks:
            if k + 1 in rows:
                rows[k].Ord = conv_order(rows[k].E_N, rows[k + 1].E_N, k, kind)
        report.rows.extend(rows[k] for k in ks)
    return report


def format_eps(eps: float) -> str:
    """``2^-k`` for exact powers of two, decimal otherwise."""
    mant, expo = math.frexp(eps)
    if mant == 0.5 and expo - 1 <= 0:
        return f"2^{expo - 1}"
    return repr(float(eps))


def parse_eps(text: str) -> float:
    """Accept ``2^-k`` (also ``2**-k``) or a plain decimal."""
    s = text.strip().replace("**", "^")
    if s.startswith("2^"):
        try:
            val = 2.0 ** int(s[2:])
        except ValueError:
            raise ValueError(f"cannot parse eps {text!r}") from None
    else:
        try:
            val = float(s)
        except ValueError:
            raise ValueError(f"cannot parse eps {text!r}") from None
    if not (val > 0 and math.isfinite(val)):
        raise ValueError(f"eps must be positive, got {text!r}")
    return val


def _cells(row: ConvergenceRow, with_global: bool) -> list:
    cells = [
        row.mesh,
        format_eps(row.eps),
        str(row.N),
        f"{row.E_N:.3e}" if row.E_N is not None else "",
        f"{row.Ord:.2f}" if row.Ord is not None else "",
        str(row.iters) if row.iters is not None else "",
    ]
    if with_global:
        cells.append(f"{row.global_E_N:.3e}" if row.global_E_N is not None else "")
    return cells


def _has_global(report: ConvergenceReport) -> bool:
    return report.metadata.get("global", "none") != "none"


def to_csv(report: ConvergenceReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    with_global = _has_global(report)
    writer.writerow(CSV_HEADER + (["global_E_N"] if with_global else []))
    for row in report.rows:
        writer.writerow(_cells(row, with_global))
    return buf.getvalue()


def to_markdown(report: ConvergenceReport) -> str:
    with_global = _has_global(report)
    header = CSV_HEADER + (["global_E_N"] if with_global else [])
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    for row in report.rows:
        cells = _cells(row, with_global)
        if row.error:
            cells[3] = "failed"
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def read_csv(text: str) -> list:
    """Parse a report CSV back into dictionaries of floats/ints (empty -> None)."""
    out = []
    for rec in csv.DictReader(io.StringIO(text)):
        row = {"mesh": rec["mesh"], "eps": parse_eps(rec["eps"]), "N": int(rec["N"])}
        for key in ("E_N", "Ord", "global_E_N"):
            if key in rec:
                row[key] = float(rec[key]) if rec[key] else None
        row["iters"] = int(rec["iters"]) if rec["iters"] else None
        out.append(row)
    return out
