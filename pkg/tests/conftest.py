import numpy as np
import pytest

from distdyn.panel import PanelDataset
from distdyn.synthetic import write_fixture


def make_panel(values, years=None, regions=None, adjacency=None, var="ci", **extra):
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    entities = [f"e{i}" for i in range(values.shape[0])]
    years = years if years is not None else range(2000, 2000 + values.shape[1])
    data = {var: values}
    data.update({k: np.asarray(v, dtype=float).reshape(values.shape) for k, v in extra.items()})
    return PanelDataset(entities, years, data, regions, adjacency)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def fixture_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("fixture")
    write_fixture(d, seed=0, grid_size=64)
    return d


# one summary line per acceptance criterion ----------------------------------------

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call" and not (call.when == "setup" and call.excinfo):
        return
    n, title = marker.args
    ok = call.excinfo is None
    prev = _criteria.get(n, (title, True))
    _criteria[n] = (title, prev[1] and ok)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        title, ok = _criteria[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {n:2d}. {title}")
