import numpy as np
import pytest

from teachsim import builtin_skills


@pytest.fixture(scope="session")
def skills():
    return {s.id: s for s in builtin_skills()}


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
