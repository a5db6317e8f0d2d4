from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cihomol import CIRing  # noqa: E402


@pytest.fixture
def r22():
    return CIRing.parse("p=5;exps=2,2")


@pytest.fixture
def r24():
    return CIRing.parse("p=5;exps=2,4")


@pytest.fixture
def r34():
    return CIRing.parse("p=5;exps=3,4")


@pytest.fixture
def r55():
    return CIRing.parse("p=5;exps=5,5")
