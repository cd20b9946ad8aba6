"""Layer-adapted meshes x_i = psi(i/N) for problems with layers at both ends.

Four generating functions are provided: the standard and modified Shishkin
meshes, the modified Bakhvalov mesh and a Liseikin-type mesh. Each is defined
on [0, 1/2] and extended by psi(t) = 1 - psi(1 - t).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import ConfigError

KINDS = ("shishkin", "shishkin-mod", "bakhvalov", "liseikin")

BAKHVALOV_Q = 0.4
LISEIKIN_DEFAULTS = {"a": 1.0, "n": 2.0, "k": 1.0, "c0": 0.0}


@dataclass(frozen=True)
class Mesh:
    """Ordered grid 0 = x_0 < ... < x_N = 1 plus generator metadata."""

    points: np.ndarray
    N: int
    kind: str
    params: Mapping[str, float]
    eps: float
    diagnostics: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def h(self) -> np.ndarray:
        """Step sizes h_i = x_{i+1} - x_i, i = 0..N-1."""
        return np.diff(self.points)


def transition_point(eps: float, N: int, m: float) -> float:
    """Shishkin transition point min(2 eps ln N / sqrt(m), 1/4)."""
    if N < 4:
        raise ConfigError(f"N must be at least 4, got {N}")
    if not (eps > 0 and m > 0):
        raise ConfigError("eps and m must be positive")
    return min(2.0 * eps * math.log(N) / math.sqrt(m), 0.25)


def bakhvalov_alpha(a: float, q: float, eps: float) -> float:
    """Abscissa where the tangent from (1/2, 1/2) touches a*eps*t/(q - t)."""
    return (q - math.sqrt(a * q * eps * (1.0 - 2.0 * q + 2.0 * a * eps))) / (1.0 + 2.0 * a * eps)


def liseikin_constants(eps: float, a: float, n: float, k: float, c0: float):
    """Return (d, c1) for the Liseikin generator."""
    r = 1.0 / (1.0 + n * a)
    d = 4.0 * (1.0 - eps ** (k * a * r))
    half = (
        eps ** (k * a * n * r)
        - eps**k
        + d / (4.0 * a) * eps ** (k * a * (n - 1.0) * r)
        + 0.5 * d**2 / a * (1.0 / a + 1.0) * eps ** (k * a * (n - 2.0) * r) * 0.25**2
        + c0 * 0.25**3
    )
    return d, 1.0 / (2.0 * half)


def _validate(kind: str, params: Mapping[str, float]) -> None:
    if kind not in KINDS:
        raise ConfigError(f"unknown mesh kind {kind!r}; expected one of {', '.join(KINDS)}")
    if kind in ("shishkin", "shishkin-mod"):
        lam = params["lam"]
        if not 0.0 < lam <= 0.25:
            raise ConfigError(f"transition point must lie in (0, 1/4], got {lam}")
    elif kind == "bakhvalov":
        a, q, eps = params["a"], params["q"], params["eps"]
        if not 0.0 < q < 0.5:
            raise ConfigError(f"bakhvalov q must lie in (0, 1/2), got {q}")
        if not 0.0 < a < q / eps:
            raise ConfigError(f"bakhvalov a must lie in (0, q/eps) = (0, {q / eps:g}), got {a}")
        m = params.get("m")
        if m is not None and a * math.sqrt(m) < 2.0 - 1e-12:
            raise ConfigError(f"bakhvalov needs a*sqrt(m) >= 2, got a={a}, m={m}")
        alpha = bakhvalov_alpha(a, q, eps)
        if not 0.0 < alpha < 0.5:
            raise ConfigError(f"bakhvalov contact point {alpha} outside (0, 1/2)")
    else:
        a, eps = params["a"], params["eps"]
        if not a > 0:
            raise ConfigError(f"liseikin a must be positive, got {a}")
        if not 0.0 < eps < 1.0:
            raise ConfigError(f"liseikin mesh needs 0 < eps < 1, got {eps}")
        if params["n"] < 0 or params["k"] <= 0 or params["c0"] < 0:
            raise ConfigError("liseikin needs n >= 0, k > 0, c0 >= 0")


def _psi_left(kind: str, t: np.ndarray, params: Mapping[str, float]) -> np.ndarray:
    # t in [0, 1/2]
    if kind == "shishkin":
        lam = params["lam"]
        return np.where(t <= 0.25, 4.0 * lam * t, lam + 2.0 * (1.0 - 2.0 * lam) * (t - 0.25))
    if kind == "shishkin-mod":
        lam = params["lam"]
        p = 32.0 * (1.0 - 4.0 * lam)
        s = np.maximum(t - 0.25, 0.0)
        return p * s**3 + 4.0 * lam * t
    if kind == "bakhvalov":
        a, q, eps = params["a"], params["q"], params["eps"]
        alpha = bakhvalov_alpha(a, q, eps)
        mu_alpha = a * eps * alpha / (q - alpha)
        dmu_alpha = a * eps * q / (q - alpha) ** 2
        tl = np.minimum(t, alpha)
        return np.where(t <= alpha, a * eps * tl / (q - tl), mu_alpha + dmu_alpha * (t - alpha))
    a, n, k, c0, eps = params["a"], params["n"], params["k"], params["c0"], params["eps"]
    d, c1 = liseikin_constants(eps, a, n, k, c0)
    r = 1.0 / (1.0 + n * a)
    tl = np.minimum(t, 0.25)
    inner = c1 * eps**k * ((1.0 - d * tl) ** (-1.0 / a) - 1.0)
    s = t - 0.25
    outer = c1 * (
        eps ** (k * a * n * r)
        - eps**k
        + d / a * eps ** (k * a * (n - 1.0) * r) * s
        + 0.5 * d**2 / a * (1.0 / a + 1.0) * eps ** (k * a * (n - 2.0) * r) * s**2
        + c0 * s**3
    )
    return np.where(t <= 0.25, inner, outer)


def psi(kind: str, t, params: Mapping[str, float]):
    """Evaluate the generating function of ``kind`` at ``t`` in [0, 1].

    Parameters
    ----------
    kind : str
        One of ``KINDS``.
    t : float or array_like
        Reference coordinate(s) in [0, 1].
    params : mapping
        ``lam`` for the Shishkin pair; ``a``, ``q``, ``eps`` (and optionally
        ``m``) for Bakhvalov; ``a``, ``n``, ``k``, ``c0``, ``eps`` for Liseikin.

    Raises
    ------
    ConfigError
        If the parameters fall outside the generator's admissible domain.
    """
    _validate(kind, params)
    t_arr = np.asarray(t, dtype=float)
    if np.any((t_arr < 0.0) | (t_arr > 1.0)):
        raise ConfigError("t must lie in [0, 1]")
    upper = t_arr > 0.5
    tt = np.where(upper, 1.0 - t_arr, t_arr)
    val = _psi_left(kind, tt, params)
    out = np.where(upper, 1.0 - val, val)
    return float(out) if out.ndim == 0 else out


def default_params(kind: str, N: int, eps: float, m: float, overrides: Mapping[str, float] | None = None) -> dict:
    """Generator parameters for ``kind`` with any user overrides applied."""
    overrides = dict(overrides or {})
    if kind in ("shishkin", "shishkin-mod"):
        params = {"lam": transition_point(eps, N, m)}
    elif kind == "bakhvalov":
        params = {"a": 2.0 / math.sqrt(m), "q": BAKHVALOV_Q, "eps": eps, "m": m}
    elif kind == "liseikin":
        params = dict(LISEIKIN_DEFAULTS, eps=eps)
    else:
        raise ConfigError(f"unknown mesh kind {kind!r}; expected one of {', '.join(KINDS)}")
    unknown = set(overrides) - set(params)
    if unknown:
        raise ConfigError(f"unsupported parameter(s) for {kind} mesh: {', '.join(sorted(unknown))}")
    params.update({key: float(v) for key, v in overrides.items()})
    return params


def build_mesh(kind: str, N: int, eps: float, problem_m: float = 1.0, overrides: Mapping[str, float] | None = None) -> Mesh:
    """Build the ``kind`` mesh with N intervals for perturbation ``eps``.

    The left half is generated from psi and mirrored, so x_{N-i} = 1 - x_i
    holds exactly and the endpoints are exactly 0 and 1.
    """
    if not isinstance(N, (int, np.integer)) or N < 8 or N % 4:
        raise ConfigError(f"N must be a multiple of 4 and at least 8, got {N}")
    if not eps > 0:
        raise ConfigError(f"eps must be positive, got {eps}")
    N = int(N)
    params = default_params(kind, N, eps, problem_m, overrides)
    half = N // 2
    left = np.asarray(psi(kind, np.arange(half + 1) / N, params), dtype=float)
    raw_mid = float(left[-1])
    left[0] = 0.0
    left[-1] = 0.5
    points = np.concatenate([left, 1.0 - left[-2::-1]])

    if np.any(np.diff(points) <= 0):
        raise ConfigError(f"{kind} mesh with N={N}, eps={eps:g} is not strictly increasing")

    diagnostics = {"psi_half_defect": raw_mid - 0.5}
    if kind in ("shishkin", "shishkin-mod"):
        diagnostics["lambda"] = params["lam"]
    elif kind == "bakhvalov":
        diagnostics["alpha"] = bakhvalov_alpha(params["a"], params["q"], eps)
    else:
        d, c1 = liseikin_constants(eps, params["a"], params["n"], params["k"], params["c0"])
        diagnostics["d"] = d
        diagnostics["c1"] = c1
    return Mesh(points=points, N=N, kind=kind, params=params, eps=eps, diagnostics=diagnostics)


def uniform_mesh(N: int) -> Mesh:
    """Equidistant mesh; handy for small verification runs."""
    if N < 2:
        raise ConfigError(f"N must be at least 2, got {N}")
    points = np.linspace(0.0, 1.0, N + 1)
    return Mesh(points=points, N=N, kind="uniform", params={}, eps=float("nan"))


def write_mesh_csv(mesh: Mesh, fh) -> None:
    """Write ``i,x_i,h_i`` rows; h_N is left empty."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["i", "x_i", "h_i"])
    h = mesh.h
    for i, x in enumerate(mesh.points):
        writer.writerow([i, repr(float(x)), repr(float(h[i])) if i < mesh.N else ""])
