import pytest

from spintomo import frames, run_selftest


@pytest.fixture(scope="session")
def grid_single():
    return frames.make_grid(spheres=1)


@pytest.fixture(scope="session")
def grid_pair():
    return frames.make_grid(spheres=2)


@pytest.fixture(scope="session")
def selftest_report():
    """One full selftest run shared by the acceptance tests."""
    return run_selftest()
