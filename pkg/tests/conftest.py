from __future__ import annotations

from pathlib import Path

import pytest

from depkit.corpus import Corpus, parse_corpus, parse_source

FIXTURES = Path(__file__).parent / "fixtures"


def corpus_from(source: str, rel: str = "inline.art") -> Corpus:
    return Corpus(parse_source(source, rel))


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def redundant_hint_corpus() -> Corpus:
    return parse_corpus(FIXTURES / "redundant_hint")


@pytest.fixture(scope="session")
def five_file_corpus() -> Corpus:
    return parse_corpus(FIXTURES / "five_files")


@pytest.fixture(scope="session")
def opaque_chain_corpus() -> Corpus:
    return parse_corpus(FIXTURES / "opaque_chain")
