import pytest

from rectcover.fixtures import random_corpus

SMALL_CORPUS_SIZE = 220
PARAMS = [(1, 0), (1, 1), (3, 1), (1, 2)]


@pytest.fixture(scope="session")
def small_corpus():
    """Seeded random polygons with 2 to 8 base rectangles."""
    return random_corpus(SMALL_CORPUS_SIZE, seed=1, max_base=8, min_base=2)


@pytest.fixture(scope="session")
def medium_corpus():
    """Larger random polygons, some with holes."""
    return random_corpus(40, seed=7, min_base=10, box=14, max_rects=10)
