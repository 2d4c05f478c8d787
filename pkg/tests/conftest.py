import numpy as np
import pytest

from gsgf.field_ops import leray_project, remove_mean
from gsgf.grid import forward_transform, make_grid, truncate


def random_modes(grid, rng, components=None, solenoidal=True, kmax=None):
    """Random real field's resolved modes; optionally band-limited to ``|k_i| <= kmax``."""
    shape = grid.shape if components is None else (components,) + grid.shape
    f_hat = truncate(forward_transform(rng.standard_normal(shape), grid), grid)
    if kmax is not None:
        f_hat = f_hat * np.all(np.abs(grid.wavenumbers) <= kmax, axis=0)
    if components is not None and solenoidal:
        f_hat = leray_project(remove_mean(f_hat, grid), grid)
    return f_hat


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=[(2, 8), (2, 12), (3, 8)], ids=lambda p: f"d{p[0]}n{p[1]}")
def small_grid(request):
    return make_grid(*request.param)


def shear_field(grid, amplitude=1.0):
    """Physical ``(sin x2, 0[, 0])``."""
    u = np.zeros((grid.dim,) + grid.shape)
    u[0] = amplitude * np.sin(grid.points[1])
    return u


def taylor_green_field(grid, amplitude=1.0):
    x1, x2 = grid.points[0], grid.points[1]
    u = np.zeros((grid.dim,) + grid.shape)
    u[0] = amplitude * np.sin(x1) * np.cos(x2)
    u[1] = -amplitude * np.cos(x1) * np.sin(x2)
    return u


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (report.when != "call" and report.passed):
        return
    number, title = marker.args
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    verdict = "PASS" if report.passed else "FAIL"
    item.config.stash.setdefault(_ACCEPTANCE, []).append(f"criterion {number} {verdict}  {title}  {detail}".rstrip())


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
