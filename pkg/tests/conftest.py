"""Shared fixtures: named complexes, fixture files and a seeded RNG."""

import os
import random
from pathlib import Path

import pytest

from tropdeg.core import fixtures
from tropdeg.core.functions import from_divisor

FIXTURES_DIR = Path(__file__).parent / "fixtures"
SEED = int(os.environ.get("TROPDEG_SEED", "20261016"))


@pytest.fixture
def fixtures_dir():
    """Directory holding the JSON/YAML input files."""
    return FIXTURES_DIR


@pytest.fixture
def rng():
    """Random generator seeded from TROPDEG_SEED."""
    return random.Random(SEED)


@pytest.fixture
def p2():
    return fixtures.p2()


@pytest.fixture
def p1xp1():
    return fixtures.p1xp1()


@pytest.fixture
def hirzebruch1():
    return fixtures.hirzebruch1()


@pytest.fixture
def p3():
    return fixtures.p3()


@pytest.fixture
def elliptic():
    return fixtures.elliptic()


@pytest.fixture
def phi_h(p2):
    """PL function of the hyperplane class on P2: values (0, 0, -1)."""
    return from_divisor(fixtures.hyperplane(p2))
