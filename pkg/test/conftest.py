import pytest

from reebrigidity import config as settings

# modules that only do arithmetic on closed forms run first
FAST_MODULES = (
    "test_exceptions",
    "test_hooks",
    "test_properties",
    "test_classes",
    "test_util",
    "test_spectrum",
    "test_constellation",
    "test_profiles",
)


def pytest_addoption(parser):
    """
    Adds the command line option --skip-slow.

    :param parser: The parser object. Please see <https://docs.pytest.org/en/latest/reference.html#_pytest.hookspec.pytest_addoption>`_
    :type Parser object: For more information please see <https://docs.pytest.org/en/latest/reference.html#_pytest.config.Parser>`_
    """
    parser.addoption(
        "--skip-slow",
        action="store_true",
        help="Skips the orbit scans and the plug checks above dimension three",
        default=False,
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: orbit scans and high dimensional plug checks")


@pytest.hookimpl
def pytest_collection_modifyitems(config, items):
    fast_items = []
    numeric_items = []
    slow_items = []

    skip_slow = pytest.mark.skip(reason="--skip-slow given")
    for item in items:
        module = item.fspath.purebasename
        if item.get_closest_marker("slow"):
            if config.getoption("--skip-slow"):
                item.add_marker(skip_slow)
            slow_items.append(item)
        elif module in FAST_MODULES:
            fast_items.append(item)
        else:
            numeric_items.append(item)

    items[:] = fast_items + numeric_items + slow_items


@pytest.fixture
def coarse_grids(monkeypatch):
    """
    Smaller plug and factor grids for tests that only need the qualitative
    answer.
    """
    for name, value in (
        ("PLUG_GRID", 128),
        ("PLUG_RHO_GRID", 16),
        ("PLUG_S_GRID", 16),
        ("FACTOR_GRID", 32),
        ("KERNEL_SAMPLES", 100),
    ):
        monkeypatch.setattr(settings, name, value)
