import os
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).resolve().parent
DATA_DIR = TESTS_DIR.parent / "data"

# must be set before the package loads its settings singleton
os.environ.setdefault("XORGADGET_CONFIG", str(TESTS_DIR / "config.json"))

from xorgadget_hub.core.formula import Clause, CnfFormula  # noqa: E402
from xorgadget_hub.core.max2xor import Max2XorProblem, XorConstraint  # noqa: E402
from xorgadget_hub.infra.storage import StorageManager  # noqa: E402


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def storage() -> StorageManager:
    return StorageManager()


@pytest.fixture
def worked_example() -> Max2XorProblem:
    """{1: x1=0, 1: x1⊕x2=0}"""
    return Max2XorProblem(2, (XorConstraint.unary(1, 0, 1), XorConstraint.pair(1, 2, 0, 1)))


@pytest.fixture
def sat3_formula() -> CnfFormula:
    return CnfFormula(4, (Clause.of(1, 2, 3), Clause.of(-1, 2, -4), Clause.of(1, -3, 4)))


@pytest.fixture
def unsat_formula() -> CnfFormula:
    return CnfFormula(1, (Clause.of(1), Clause.of(-1)))


@pytest.fixture
def write_file(tmp_path):
    def write(name: str, text: str) -> Path:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path
    return write
