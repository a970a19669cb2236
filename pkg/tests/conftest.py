import pytest
from hypothesis import HealthCheck, settings

from fmca import fixture_names, fixture_path
from fmca.cnf import encode_fm_to_cnf
from fmca.fm import load_feature_model

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FIXTURES = fixture_names()


@pytest.fixture(scope="session")
def models():
    return {name: load_feature_model(fixture_path(name)) for name in FIXTURES}


@pytest.fixture(scope="session")
def cnfs(models):
    return {name: encode_fm_to_cnf(fm) for name, fm in models.items()}


@pytest.fixture(scope="session")
def aircraft(models):
    return models["aircraft"]


@pytest.fixture(scope="session")
def aircraft_cnf(cnfs):
    return cnfs["aircraft"]


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS):
        ok, detail = RESULTS[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {key}: {detail}")
