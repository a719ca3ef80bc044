from pathlib import Path

import pytest

from fedfeed.corpus import load_corpus

DATA_DIR = Path(__file__).parent / "data"
FIXTURE_CORPUS = DATA_DIR / "corpus_fixture.jsonl"

# Fixed clock for recency math: a bit after the newest fixture event.
FIXTURE_NOW = 1700010000


@pytest.fixture
def corpus():
    return load_corpus(FIXTURE_CORPUS)


@pytest.fixture
def corpus_path():
    return FIXTURE_CORPUS
