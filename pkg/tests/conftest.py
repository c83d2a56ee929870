import numpy as np
import pytest
from hypothesis import strategies as st

from folding_assembly.config import ScenarioConfig
from folding_assembly.simulator import run_loop

finite = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False)
vec3 = st.tuples(finite, finite, finite).map(np.array)


@st.composite
def unit_vec3(draw):
    v = draw(vec3)
    n = np.linalg.norm(v)
    if n < 1e-3:
        v, n = np.array([0.0, 0.0, 1.0]), 1.0
    return v / n


def cross_oracle(a, b):
    """Componentwise cross product, written out independently of the package."""
    return np.array(
        [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]],
        dtype=float,
    )


@pytest.fixture(scope="session")
def nominal_log():
    return run_loop(ScenarioConfig())


@pytest.fixture(scope="session")
def noise_free_log():
    cfg = ScenarioConfig().with_values(
        **{"sensor.sigma_f": 0.0, "sensor.sigma_tau": 0.0, "sensor.filter_window": 1}
    )
    return run_loop(cfg)


_REPORT: list = []


@pytest.fixture(scope="session")
def criterion_report():
    return _REPORT


def pytest_terminal_summary(terminalreporter):
    if _REPORT:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_REPORT):
            terminalreporter.write_line(line)
