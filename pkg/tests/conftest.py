import pytest

from ricsim.scenario import two_slice_scenario, run


@pytest.fixture(scope="session")
def quiet_runs():
    """Zero-noise two-slice scenario, both arms."""
    return {cm: run(two_slice_scenario(cm_enabled=cm, noise_sigma=0.0)) for cm in (False, True)}


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
