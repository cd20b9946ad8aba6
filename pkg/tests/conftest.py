import numpy as np
import pytest

from spbvp.problem import Problem

_ACCEPTANCE = []


def record_acceptance(number, passed, detail):
    _ACCEPTANCE.append((number, passed, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}")


def _sine_f(x, y, eps):
    return 2.0 * y + np.sin(y) - np.exp(x)


def _sine_fy(x, y, eps):
    return 2.0 + np.cos(y)


@pytest.fixture
def sine_problem():
    """Nonlinear problem with 1 <= f_y <= 3; needs gamma = 3."""
    return Problem(name="test:sine", f=_sine_f, f_y=_sine_fy, m=1.0, gamma_default=3.0)


@pytest.fixture
def zero_problem():
    return Problem(name="test:zero", f=lambda x, y, eps: y, f_y=lambda x, y, eps: np.ones_like(y), m=1.0)
