import json
import os
import sys

import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from src.algebra import build_mn, build_tn  # noqa: E402
from src.scalar import ScalarDomain  # noqa: E402

GOLDEN_FILE = os.path.join(ROOT, "reports", "golden_dimensions.json")


@pytest.fixture(scope="session")
def q():
    return ScalarDomain.rationals()


@pytest.fixture(scope="session")
def f7():
    return ScalarDomain.prime_field(7)


@pytest.fixture(scope="session")
def t2(q):
    return build_tn(2, q)


@pytest.fixture(scope="session")
def t3(q):
    return build_tn(3, q)


@pytest.fixture(scope="session")
def m2(q):
    return build_mn(2, q)


@pytest.fixture(scope="session")
def golden():
    with open(GOLDEN_FILE, "r", encoding="utf-8") as f:
        return json.load(f)["dimensions"]


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(1234)
