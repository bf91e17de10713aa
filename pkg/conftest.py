from pathlib import Path

import numpy as np
import pytest
from loguru import logger

from src.config import RunConfig
from src.graph import generators

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def k4():
    return generators.complete_graph(4)


@pytest.fixture
def triangles():
    return generators.two_triangles()


@pytest.fixture
def karate():
    return generators.karate_club()


@pytest.fixture
def baseline_config():
    return RunConfig(use_vf=False, use_coloring=False)


@pytest.fixture
def log_messages():
    """Collects loguru messages emitted during the test."""
    messages: list[str] = []
    handler_id = logger.add(messages.append, format="{level}|{message}", level="DEBUG")
    yield messages
    logger.remove(handler_id)

