import json
import sys
from importlib import resources
from pathlib import Path

import pytest
from hypothesis import settings

from borcherds.lattice import hermitian_d3
from borcherds.product import compute_product
from borcherds.vvform import parse_vvform

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def data_json(name):
    return json.loads(resources.files("borcherds").joinpath("data", name).read_text())


@pytest.fixture(scope="session")
def L():
    return hermitian_d3()


@pytest.fixture(scope="session")
def phi45():
    return parse_vvform(data_json("phi45_input.json"))


@pytest.fixture(scope="session")
def delta9():
    return parse_vvform(data_json("delta9_input.json"))


@pytest.fixture(scope="session")
def phi45_b7(phi45):
    return compute_product(phi45, B=7)


@pytest.fixture(scope="session")
def example_doc():
    # the small three-component example document
    return {"D": -3, "components": [
        {"key": [0, 0], "terms": [{"exp": "0", "coeff": "1"}, {"exp": "1", "coeff": "2"}]},
        {"key": [1, 0], "terms": [{"exp": "1/3", "coeff": "4"}]},
        {"key": [-1, 0], "terms": [{"exp": "1/3", "coeff": "4"}]},
    ]}


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
