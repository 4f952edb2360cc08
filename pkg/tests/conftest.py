import pytest

from emoact.config import EngineConfig
from emoact.story import load_story


@pytest.fixture
def config():
    return EngineConfig()


@pytest.fixture
def detective():
    return load_story("detective")


@pytest.fixture
def wizard():
    return load_story("wizard")
