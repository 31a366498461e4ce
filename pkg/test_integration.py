#!/usr/bin/env python3
"""
Integration test for the MOLS toolkit: reproduce every golden fixture end to end.
"""

import io

import pytest

from mols.commands import FIXTURE_NAMES
from mols.main import run


@pytest.mark.parametrize('fixture', FIXTURE_NAMES)
def test_reproduce_fixture(fixture, app_config):
    out = io.StringIO()
    code = run(['reproduce', fixture], test_config=app_config, stdout=out)
    lines = out.getvalue().splitlines()
    assert not [line for line in lines if line.startswith('MISMATCH')]
    assert lines[-1].startswith(f'{fixture}: ')
    assert code == 0


if __name__ == "__main__":
    for name in FIXTURE_NAMES:
        print(f"{name}: exit {run(['reproduce', name])}")
