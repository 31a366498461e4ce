"""
Shared pytest fixtures: the small fields used throughout the test suite.
"""

import pytest

from mols.services.gf_engine import create_field


@pytest.fixture
def gf4():
    return create_field(2, 2)


@pytest.fixture
def gf8():
    return create_field(2, 3)


@pytest.fixture
def gf9():
    return create_field(3, 2)


@pytest.fixture
def app_config(tmp_path):
    """Configuration overrides that keep logs out of the working tree."""
    return {'ENV': 'development', 'LOG_LEVEL': 'ERROR', 'LOG_DIR': str(tmp_path / 'logs')}
