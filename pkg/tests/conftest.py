import json
from fractions import Fraction

import pytest

from tau3.measures import MeasureExpr


@pytest.fixture
def pair():
    """Unit atoms at +-1."""
    return MeasureExpr.symmetric_pair(1, Fraction(1))


@pytest.fixture
def half_pair():
    return MeasureExpr.symmetric_pair(1, Fraction(1, 2))


@pytest.fixture
def lebesgue():
    return MeasureExpr.lebesgue_measure()


@pytest.fixture
def geometric():
    return MeasureExpr.bernoulli_geometric(3)


@pytest.fixture
def factorial_measure():
    return MeasureExpr.bernoulli_factorial(3)


@pytest.fixture
def spec_writer(tmp_path):
    def write(name: str, doc: dict) -> str:
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return str(path)
    return write
