"""Shared fixtures."""

from pathlib import Path

import pytest

from deepqna.config import GatewaySettings
from deepqna.corpus import build_index
from deepqna.harness import fixture_questions, fixture_world, render_articles
from deepqna.llm import LLMGateway, MockBackend, load_bundled_script, parse_mock_script

RESOURCES = Path(__file__).parent / "resources"


def make_gateway(script, **settings):
    """A gateway over a mock script given as text or a MockScript."""
    if isinstance(script, str):
        script = parse_mock_script(script)
    options = {"backoff_seconds": [0.0]}
    options.update(settings)
    return LLMGateway(MockBackend(script), GatewaySettings(**options), sleep=lambda _: None)


@pytest.fixture
def gateway_for():
    """Factory for mock gateways."""
    return make_gateway


@pytest.fixture
def bundled_gateway():
    """Factory for gateways over a bundled mock script."""

    def build(name, **settings):
        return make_gateway(load_bundled_script(name), **settings)

    return build


@pytest.fixture
def world():
    """The hand-built Coe family world."""
    return fixture_world()


@pytest.fixture
def questions(world):
    """The five fixture questions."""
    return fixture_questions(world)


@pytest.fixture
def index(world):
    """Corpus index over the fixture world's articles."""
    return build_index(render_articles(world))


@pytest.fixture
def episodes_document():
    """Transcript with eight marked episodes."""
    return (RESOURCES / "episodes.txt").read_text(encoding="utf-8")
