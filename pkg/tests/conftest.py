import pathlib

import pytest

from dialogcore import build_engine, load_terminology
from dialogcore.solver import load_facts

DATA = pathlib.Path(__file__).parent / "data"
BUNDLED = pathlib.Path(__file__).resolve().parents[1] / "src" / "dialogcore" / "data"


@pytest.fixture(scope="session")
def domain_text() -> str:
    return (BUNDLED / "trains.domain").read_text()


@pytest.fixture(scope="session")
def facts_text() -> str:
    return (BUNDLED / "trains.facts").read_text()


@pytest.fixture(scope="session")
def terminology(domain_text):
    return load_terminology(domain_text)


@pytest.fixture(scope="session")
def kb(facts_text, terminology):
    return load_facts(facts_text, terminology)


@pytest.fixture(scope="session")
def engine(domain_text, facts_text):
    return build_engine(domain_text, facts_text)
