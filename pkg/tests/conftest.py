import pytest

from helpers import corpus_small


@pytest.fixture(scope="session")
def corpus():
    """Named single-sink graphs, every family at small parameters plus
    seeded random DAGs; all of them at most 12 vertices."""
    return corpus_small()
