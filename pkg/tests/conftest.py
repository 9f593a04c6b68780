import json
import os
import sys

import pytest
from hypothesis import strategies as st

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from src.numerics import ExactComplex  # noqa: E402

REPO_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))

small_fractions = st.fractions(min_value=-20, max_value=20, max_denominator=9)
gaussian_rationals = st.builds(ExactComplex, small_fractions, small_fractions)
nonzero_gaussian_rationals = gaussian_rationals.filter(lambda z: not z.is_zero())


@pytest.fixture
def family_path():
    return lambda name: os.path.join(REPO_ROOT, "families", f"{name}.json")


@pytest.fixture
def run_cli(monkeypatch):
    """Run the CLI in-process; returns (exit code, parsed report or raw text)"""
    from src.cli import run

    for name in list(os.environ):
        if name.startswith("CF_"):
            monkeypatch.delenv(name, raising=False)

    def invoke(*argv):
        code, text = run(list(argv))
        try:
            return code, json.loads(text)
        except ValueError:
            return code, text

    return invoke
