import os
import sys

import pytest

# Same import root as main.py
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'src')))

from eclift.lift import GALLERY  # noqa: E402
from eclift.weierstrass import validate_curve  # noqa: E402


@pytest.fixture
def square5():
    """y^2 = x^3 + 3x over F_5, the Gaussian-integer example."""
    return validate_curve(*GALLERY["square5"])


@pytest.fixture
def hex7():
    """y^2 = x^3 + 3 over F_7, the Eisenstein example."""
    return validate_curve(*GALLERY["hex7"])


@pytest.fixture(autouse=True)
def _no_oracle_env(monkeypatch):
    monkeypatch.delenv("ECLIFT_ORACLE_LIMIT", raising=False)
