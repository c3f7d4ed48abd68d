"""
Shared pytest configuration and fixtures for test isolation.

Resets the cached settings between tests and provides seeded rngs,
scenarios and dictionaries.
"""

import random
from typing import Callable, List

import pytest

from card_auth_lab.config import get_settings
from card_auth_lab.fixtures import load_dictionary
from card_auth_lab.simnet import Scenario

SEEDS_50 = range(50)


@pytest.fixture(autouse=True)
def reset_settings_cache(monkeypatch):
    """
    Automatically clear cached settings before and after each test.

    CARDLAB_* variables from the developer's shell are removed so tests see
    the defaults unless they set a variable themselves.
    """
    for var in ("CARDLAB_LOG_LEVEL", "CARDLAB_DELTA_T", "CARDLAB_FIXTURES_DIR"):
        monkeypatch.delenv(var, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def rng():
    """A seeded rng for protocol steps."""
    return random.Random(1234)


@pytest.fixture
def scenario():
    """A fresh scenario with seed 0."""
    return Scenario(seed=0)


@pytest.fixture(scope="session")
def demo_dictionary() -> List[str]:
    """The bundled 1000-entry dictionary."""
    return load_dictionary()


@pytest.fixture
def make_dictionary() -> Callable[[int, int, str], List[str]]:
    """
    Build a dictionary of distinct entries with the password at a seeded random index.

    Usage:
        entries, index = make_dictionary(1000, seed, "secret")
    """
    def build(size: int, seed: int, password: str):
        picker = random.Random(seed)
        entries = [f"cand{seed}-{i:05d}" for i in range(size - 1)]
        index = picker.randrange(size)
        entries.insert(index, password)
        return entries, index

    return build
