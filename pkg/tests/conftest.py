import pytest


def pytest_addoption(parser):
    parser.addoption("--slow", action="store_true", default=False, help="run the long acceptance runs")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long run, enabled with --slow")
    config.addinivalue_line("markers", "criterion(label): acceptance criterion checked by the test")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--slow"):
        return
    skip = pytest.mark.skip(reason="needs --slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.call_report = rep
