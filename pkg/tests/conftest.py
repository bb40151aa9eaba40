import pytest

from emorank import EngineConfig
from emorank.datastore import fixtures_root
from emorank.lexicon import load_lexicon_file


@pytest.fixture(scope="session")
def config():
    return EngineConfig()


@pytest.fixture(scope="session")
def lexicon(config):
    """The shipped default lexicon (5 one-hot dims, news + ads contexts)."""
    return load_lexicon_file(fixtures_root() / "lexicon.json", config)
