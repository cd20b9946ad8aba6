import math

import numpy as np
import pytest
from oracles import builtin_exact, builtin_f, dense_newton

from spbvp.harness import (
    ConvergenceReport,
    ConvergenceRow,
    conv_order,
    discrete_error,
    format_eps,
    parse_eps,
    read_csv,
    run_convergence,
    to_csv,
    to_markdown,
)
from spbvp.mesh import KINDS, build_mesh, uniform_mesh
from spbvp.problem import Problem, make_builtin_example1
from spbvp.scheme import SchemeParams
from spbvp.solver import DiscreteSolution, SolverConfig, newton_solve

CFG = SolverConfig(initial_value=-0.5)


@pytest.fixture(scope="module")
def p():
    return make_builtin_example1()


def test_discrete_error_of_exact_values_is_zero(p):
    mesh = build_mesh("shishkin", 32, 2.0**-10)
    sol = DiscreteSolution(mesh, p.exact(mesh.points, 2.0**-10), 0, 0.0, True, SchemeParams(eps=2.0**-10))
    assert discrete_error(sol, p, 2.0**-10) == 0.0


@pytest.mark.parametrize("eps", [0.25, 2.0**-5])
def test_discrete_error_on_four_cells(p, eps):
    mesh = uniform_mesh(4)
    sol = newton_solve(p, mesh, SchemeParams(eps=eps), SolverConfig(tol=1e-14, initial_value=-0.5))
    ref_y = dense_newton(builtin_f(eps), mesh.points, 0.5, 1.0, eps)
    diffs = [abs(float(builtin_exact(x, eps)) - y) for x, y in zip(mesh.points, ref_y)]
    assert discrete_error(sol, p, eps) == pytest.approx(max(diffs), rel=1e-9)


def test_discrete_error_needs_exact_solution():
    q = Problem("noexact", lambda x, y, e: y, lambda x, y, e: np.ones_like(y), m=1.0)
    mesh = build_mesh("shishkin", 16, 0.1)
    sol = newton_solve(q, mesh, SchemeParams(eps=0.1))
    with pytest.raises(ValueError):
        discrete_error(sol, q, 0.1)


def test_conv_order_examples():
    assert conv_order(4e-3, 1e-3, 7, "bakhvalov") == pytest.approx(2.0, abs=1e-15)
    assert conv_order(9.196e-4, 2.911e-4, 8, "shishkin") == pytest.approx(2.00, abs=5e-3)
    assert conv_order(1e-3, 1e-3, 5, "liseikin") == 0.0


def test_conv_order_shishkin_denominator():
    k = 6
    assert conv_order(2.0, 1.0, k, "shishkin-mod") == pytest.approx(math.log(2) / math.log(2 * k / (k + 1)))


@pytest.mark.parametrize("args", [(0.0, 1e-3), (1e-3, 0.0), (-1.0, 1.0), (None, 1.0), (float("inf"), 1.0)])
def test_conv_order_undefined(args):
    assert conv_order(*args, 8, "shishkin") is None
    assert conv_order(1.0, 0.5, 1, "shishkin") is None


def test_two_refinements_give_one_order(p):
    eps_list = [2.0**-3, 2.0**-10]
    rep = run_convergence(p, "shishkin", [4, 5], eps_list, cfg=CFG)
    assert len(rep.rows) == 4
    for eps in eps_list:
        block = rep.block("shishkin", eps)
        assert [r.N for r in block] == [16, 32]
        assert block[0].Ord is not None and block[1].Ord is None


def test_row_order_is_eps_major(p):
    rep = run_convergence(p, "liseikin", [5, 4], [2.0**-5, 2.0**-3], cfg=CFG)
    assert [(r.eps, r.N) for r in rep.rows] == [(2.0**-5, 16), (2.0**-5, 32), (2.0**-3, 16), (2.0**-3, 32)]


def test_error_decreases_strictly_on_modified_shishkin(p):
    rep = run_convergence(p, "shishkin-mod", range(4, 13), [2.0**-10], cfg=CFG)
    E = [r.E_N for r in rep.rows]
    assert all(a > b for a, b in zip(E, E[1:])), E


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("eps", [2.0**-10, 2.0**-20, 2.0**-30, 2.0**-40], ids=format_eps)
def test_orders_stay_in_observed_range(p, kind, eps):
    rep = run_convergence(p, kind, range(5, 13), [eps], cfg=CFG)
    orders = [r.Ord for r in rep.rows if r.N <= 2**11]
    assert len(orders) == 7
    bad = [(r.N, round(r.Ord, 2)) for r in rep.rows if r.N <= 2**11 and not 1.6 <= r.Ord <= 3.3]
    assert not bad, f"{kind} eps={format_eps(eps)}: orders outside [1.6, 3.3] at {bad}"


@pytest.mark.parametrize("kind", KINDS)
def test_newton_tolerance_does_not_change_table(p, kind):
    eps_list = [2.0**-5, 2.0**-20]
    loose = run_convergence(p, kind, range(4, 10), eps_list, cfg=SolverConfig(tol=1e-8, initial_value=-0.5))
    tight = run_convergence(p, kind, range(4, 10), eps_list, cfg=SolverConfig(tol=1e-12, initial_value=-0.5))
    assert [f"{r.E_N:.3e}" for r in loose.rows] == [f"{r.E_N:.3e}" for r in tight.rows]


def test_reports_are_reproducible(p):
    runs = [run_convergence(p, "bakhvalov", range(4, 9), [2.0**-3, 2.0**-30], cfg=CFG, global_kind="cubic") for _ in range(2)]
    assert runs[0].rows == runs[1].rows
    assert to_csv(runs[0]) == to_csv(runs[1])


def test_failures_are_recorded_per_row(p):
    # a = 7 violates a < q/eps at eps = 2^-4 (q/eps = 6.4) but not at 2^-10
    rep = run_convergence(p, "bakhvalov", [4, 5], [2.0**-4, 2.0**-10], cfg=CFG, mesh_overrides={"a": 7.0})
    bad = rep.block("bakhvalov", 2.0**-4)
    assert all(r.error and r.error.startswith("ConfigError") and r.E_N is None for r in bad)
    good = rep.block("bakhvalov", 2.0**-10)
    assert all(r.error is None and r.E_N > 0 for r in good)


def test_stability_failure_recorded(p):
    rep = run_convergence(p, "shishkin", [4], [2.0**-10], sp=SchemeParams(gamma=0.5), cfg=SolverConfig(strict=True))
    assert rep.rows[0].error.startswith("StabilityError")


def test_global_error_column(p):
    rep = run_convergence(p, "shishkin-mod", [6, 7], [2.0**-20], cfg=CFG, global_kind="linear", sample_density=5)
    assert all(r.global_E_N >= r.E_N for r in rep.rows)
    assert rep.metadata["global"] == "linear" and rep.metadata["samples_per_interval"] == 5


@pytest.mark.parametrize("text,value", [("2^-10", 2.0**-10), ("2**-3", 0.125), ("0.25", 0.25), (" 1e-3 ", 1e-3)])
def test_parse_eps(text, value):
    assert parse_eps(text) == value


@pytest.mark.parametrize("text", ["abc", "2^x", "-1", "0", "inf"])
def test_parse_eps_rejects(text):
    with pytest.raises(ValueError):
        parse_eps(text)


def test_format_eps():
    assert format_eps(2.0**-40) == "2^-40"
    assert format_eps(1.0) == "2^0"
    assert format_eps(0.3) == "0.3"
    assert parse_eps(format_eps(2.0**-7)) == 2.0**-7


def test_csv_layout_and_round_trip(p):
    rep = run_convergence(p, "shishkin", range(4, 7), [2.0**-3, 0.3], cfg=CFG, global_kind="cubic")
    text = to_csv(rep)
    lines = text.split("\n")
    assert lines[0] == "mesh,eps,N,E_N,Ord,iters,global_E_N"
    assert lines[1].startswith("shishkin,2^-3,16,")
    assert text.endswith("\n") and "\r" not in text
    back = read_csv(text)
    for row, rec in zip(rep.rows, back):
        assert rec["eps"] == row.eps and rec["N"] == row.N and rec["iters"] == row.iters
        assert rec["E_N"] == float(f"{row.E_N:.3e}")
        assert rec["global_E_N"] == float(f"{row.global_E_N:.3e}")
        assert rec["Ord"] == (float(f"{row.Ord:.2f}") if row.Ord is not None else None)


def test_markdown_mirrors_csv(p):
    rep = ConvergenceReport(
        rows=[ConvergenceRow("liseikin", 2.0**-5, 16, 1.2345e-3, 1.987, 2), ConvergenceRow("liseikin", 2.0**-5, 32, error="boom")]
    )
    md = to_markdown(rep).splitlines()
    assert md[0] == "| mesh | eps | N | E_N | Ord | iters |"
    assert md[2] == "| liseikin | 2^-5 | 16 | 1.234e-03 | 1.99 | 2 |"
    assert "failed" in md[3]
