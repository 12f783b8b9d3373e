from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hubcover.formats import parse_instance, parse_queens, parse_setcover  # noqa: E402

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def figure4():
    return parse_instance((DATA / "figure4.hcpi").read_text())


@pytest.fixture
def figure5():
    return parse_instance((DATA / "figure5.hcpi").read_text())


@pytest.fixture
def figure11():
    return parse_instance((DATA / "figure11.hcpi").read_text())


@pytest.fixture
def figure12():
    return parse_setcover((DATA / "figure12.setcover").read_text())


@pytest.fixture
def queens3_c3():
    return parse_queens((DATA / "queens3_c3.hcpi").read_text())
