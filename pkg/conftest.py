from __future__ import annotations

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from app import corpus, tagset  # noqa: E402

FIXTURES = ROOT / "tests" / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def worked_corpus() -> corpus.Corpus:
    with (FIXTURES / "worked_sentence.vrt").open(encoding="utf-8") as stream:
        return corpus.read_corpus(stream, "gold", name="worked")


@pytest.fixture(scope="session")
def inventory() -> tagset.TagInventory:
    return tagset.default_inventory()
