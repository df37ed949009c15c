"""
Shared fixtures: the toy corpus used throughout the test suite.

    d1: a a b      d2: b c      d3: c c c a
    o1 <- {d1, d2}              o2 <- {d3}
"""

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from indexing.associations import load_associations  # noqa: E402
from indexing.text_corpus import ingest_corpus  # noqa: E402
from utils.run_logger import reset_run_logger  # noqa: E402

TOY_DIR = ROOT / "data" / "toy"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"

TOY_DOCS = [("d1", "a a b"), ("d2", "b c"), ("d3", "c c c a")]
TOY_EDGES = [("d1", "o1"), ("d2", "o1"), ("d3", "o2")]


@pytest.fixture(autouse=True)
def _fresh_run_logger():
    reset_run_logger()
    yield
    reset_run_logger()


@pytest.fixture
def toy_index():
    return ingest_corpus(TOY_DOCS)


@pytest.fixture
def toy_table(toy_index):
    return load_associations(TOY_EDGES, toy_index)


@pytest.fixture
def toy_paths():
    return {
        "corpus": str(TOY_DIR / "corpus.tsv"),
        "associations": str(TOY_DIR / "associations.tsv"),
        "queries": str(TOY_DIR / "queries.tsv"),
        "qrels": str(TOY_DIR / "qrels.txt"),
    }


@pytest.fixture
def golden_dir():
    return GOLDEN_DIR
