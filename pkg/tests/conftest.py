import json
from importlib import resources

import pytest

from linksteer.gateway import Config, build_system
from linksteer.phy import Surrogate


def pytest_runtest_logreport(report):
    # One visible pass/fail line per acceptance criterion.
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1].replace("test_", "", 1)
        verdict = "PASS" if report.passed else "FAIL"
        print(f"\nACCEPTANCE {verdict}: {name}")


@pytest.fixture
def seed_config():
    text = resources.files("linksteer.data").joinpath("seed_default.json").read_text()
    return json.loads(text)


@pytest.fixture
def surrogate():
    return Surrogate.from_file()


@pytest.fixture
def make_system(tmp_path):
    """Fresh embedded system; window 0 ms so single requests never batch."""

    def _make(**overrides):
        kwargs = dict(conflict_window_ms=0.0, audit_log=str(tmp_path / "audit.jsonl"))
        kwargs.update(overrides)
        return build_system(Config(**kwargs))

    return _make


def scenario_path(name: str) -> str:
    return str(resources.files("linksteer.data").joinpath(f"scenarios/{name}"))


@pytest.fixture
def fig4a_path():
    return scenario_path("fig4a.jsonl")


@pytest.fixture
def fig4b_path():
    return scenario_path("fig4b.jsonl")
