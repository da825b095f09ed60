import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from tfda import samples  # noqa: E402
from tfda.pipeline import analyze_field  # noqa: E402


@pytest.fixture(scope="session")
def cos_field():
    return samples.cos_field(256)


@pytest.fixture(scope="session")
def cos_result(cos_field):
    return analyze_field(cos_field)


@pytest.fixture(scope="session")
def enstrophy_field():
    return samples.enstrophy_analog(256)
