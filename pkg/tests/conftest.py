from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from idbench.model import DirectRating, Identifier, IdentifierPair, IndirectRating

FIXTURES = Path(__file__).parent / "fixtures"
CORPUS_DIR = FIXTURES / "corpus"


@pytest.fixture(scope="session")
def corpus_files() -> list[Path]:
    files = sorted(CORPUS_DIR.glob("*.js"))
    assert len(files) == 100
    return files


def pair(id1: str, id2: str) -> IdentifierPair:
    return IdentifierPair(Identifier(id1), Identifier(id2))


def direct(participant: str, pair_id: str, relatedness: int, similarity: int) -> DirectRating:
    return DirectRating(participant=participant, pair_id=pair_id,
                        relatedness=relatedness, similarity=similarity)


def indirect(participant: str, pair_id: str, owner: str, chosen: str) -> IndirectRating:
    return IndirectRating(participant=participant, pair_id=pair_id,
                          context_owner=owner, chosen=chosen)
