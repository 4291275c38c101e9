import random

import pytest

from ellsec.field import ALT_PRIME, DEFAULT_PRIME, PrimeField
from ellsec.pipeline import PipelineConfig, execute_pipeline


@pytest.fixture(scope="session")
def field():
    return PrimeField(DEFAULT_PRIME)


@pytest.fixture(scope="session")
def alt_field():
    return PrimeField(ALT_PRIME)


@pytest.fixture()
def rng():
    return random.Random(20240917)


def _finished(config):
    run = execute_pipeline(config)
    assert run.report.passed, f"pipeline fixture failed: {run.report.error}"
    return run


@pytest.fixture(scope="session")
def pipeline5():
    return _finished(PipelineConfig(n=5, seed=1))


@pytest.fixture(scope="session")
def pipeline6():
    return _finished(PipelineConfig(n=6, seed=1))


@pytest.fixture(scope="session")
def pipeline7():
    return _finished(PipelineConfig(n=7, seed=1))
