import sys
from importlib.resources import files
from pathlib import Path

import pytest

from riskflow import parse_document, parse_model, propagate

sys.path.insert(0, str(Path(__file__).parent))

DEMO_RESOURCE = "data/demo_vehicle_assembly.json"


@pytest.fixture(scope="session")
def demo_bytes() -> bytes:
    return files("riskflow").joinpath(DEMO_RESOURCE).read_bytes()


@pytest.fixture(scope="session")
def demo_document(demo_bytes):
    return parse_document(demo_bytes)


@pytest.fixture(scope="session")
def demo_graph(demo_bytes):
    return parse_model(demo_bytes)


@pytest.fixture(scope="session")
def demo_result(demo_graph):
    return propagate(demo_graph)


@pytest.fixture()
def demo_path(tmp_path, demo_bytes) -> Path:
    path = tmp_path / "demo.json"
    path.write_bytes(demo_bytes)
    return path
