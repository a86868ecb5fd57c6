import numpy as np
import pytest

from spherodeck.catalog import load_space
from spherodeck.lie_core import LieAlgebraPresentation
from spherodeck.models import H0, sl_basis
from spherodeck.root_system import compute_roots

SHIPPED = ["group_sl2", "triple_sl2_generic", "triple_sl2_degenerate", "gp_gl2_gl1",
           "gp_gl3_gl2", "sp2_chain", "gp_u11_u1"]

_cache = {}


def space(name):
    if name not in _cache:
        _cache[name] = load_space(name)
    return _cache[name]


@pytest.fixture(scope="session")
def spaces():
    return space


@pytest.fixture(scope="session")
def sl2():
    return LieAlgebraPresentation("sl2", 2, np.array(sl_basis(2)))


@pytest.fixture(scope="session")
def sl2_rs(sl2):
    return compute_roots(sl2, [H0])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        ok, detail = RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
