from __future__ import annotations

from importlib import resources

import pytest
from hypothesis import HealthCheck, settings

from visblend.graph import load_graph
from visblend.scene import read_scene

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FIXTURES = resources.files("visblend") / "fixtures"
CONCEPTS = ("pig", "cactus", "angel")
PAIRS = (("pig", "cactus"), ("angel", "pig"), ("angel", "cactus"))


@pytest.fixture(scope="session")
def fixture_dir():
    with resources.as_file(FIXTURES) as d:
        yield d


@pytest.fixture(scope="session")
def graphs(fixture_dir):
    return {n: load_graph(fixture_dir / f"{n}.triples") for n in CONCEPTS}


@pytest.fixture(scope="session")
def scenes(fixture_dir):
    return {n: read_scene(fixture_dir / f"{n}.json") for n in CONCEPTS}


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
