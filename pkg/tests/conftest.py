import sys

import numpy as np
import pytest

import layercert as lc


def pytest_terminal_summary(terminalreporter):
    """Replay the acceptance scoreboard after capture is done with it."""
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "SCOREBOARD", None) if mod else None
    if lines:
        terminalreporter.section("acceptance scoreboard")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def surfaces():
    """One instance of every catalog surface (chart building is not free)."""
    return {name: lc.make_surface(name) for name in lc.CATALOG}


@pytest.fixture(scope="session")
def cylinder_layer(surfaces):
    return lc.LayerModel(surfaces["cylinder"], 0.2)


@pytest.fixture(scope="session")
def cone_layer(surfaces):
    return lc.LayerModel(surfaces["capped_cone"], 0.2)


@pytest.fixture(scope="session")
def plane_layer(surfaces):
    return lc.LayerModel(surfaces["plane"], 0.5)


@pytest.fixture(scope="session")
def cylinder_cert(cylinder_layer):
    return lc.certify(cylinder_layer)


@pytest.fixture(scope="session")
def cone_cert(cone_layer):
    return lc.certify(cone_layer)


@pytest.fixture(scope="session")
def plane_cert(plane_layer):
    return lc.certify(plane_layer)


def chart_samples(chart, n, rng, v_cap=30.0):
    """Random interior (s, v) samples of a chart, v clipped to a sane window."""
    s_lo, s_hi = chart.s_range
    v_lo, v_hi = chart.v_range
    v_lo = max(v_lo, -v_cap)
    v_hi = min(v_hi, v_cap)
    pad_s = 1e-3 * (s_hi - s_lo)
    pad_v = 1e-3 * (v_hi - v_lo)
    s = rng.uniform(s_lo + pad_s, s_hi - pad_s, n)
    v = rng.uniform(v_lo + pad_v, v_hi - pad_v, n)
    return s, v
