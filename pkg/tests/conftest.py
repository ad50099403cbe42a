import sys
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def three_cell_doc() -> bytes:
    return (DATA / "notebooks" / "three_cell.dlnb.json").read_bytes()


@pytest.fixture(scope="session")
def corpus_notebooks() -> list[Path]:
    return sorted((DATA / "corpus").glob("*.dlnb.json"))


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return DATA / "fixtures"
