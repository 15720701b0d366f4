from __future__ import annotations

from pathlib import Path

import pytest

from entail_ie.backends import MockEntailmentBackend, load_oracle
from entail_ie.schema import Schema, load_schema

SAMPLES = Path(__file__).resolve().parents[1] / "samples"

SAMPLE_SENTENCE = "John Smith, an executive at XYZ Corp., died in Florida on Sunday"


@pytest.fixture(scope="session")
def samples_dir() -> Path:
    return SAMPLES


@pytest.fixture()
def sample_schema() -> Schema:
    return load_schema((SAMPLES / "schema.json").read_bytes())


@pytest.fixture()
def fixture_backend() -> MockEntailmentBackend:
    return MockEntailmentBackend(load_oracle((SAMPLES / "oracle.json").read_bytes()))


@pytest.fixture()
def sample_sentence() -> str:
    return SAMPLE_SENTENCE
