import json

import pytest

from xorgadget_hub.core.convert import IsingModel, QuboModel
from xorgadget_hub.core.exceptions import ModelFormatError
from xorgadget_hub.core.max2xor import Max2XorProblem


def test_load_cnf(storage, data_dir):
    report = storage.load_cnf(data_dir / "sat3.cnf")
    assert report.formula.num_vars == 4
    assert len(report.formula.clauses) == 3


def test_is_cnf(storage, data_dir, write_file):
    assert storage.is_cnf(data_dir / "unsat.cnf")
    assert storage.is_cnf(write_file("formula.txt", "c comment\np cnf 1 1\n1 0\n"))
    assert not storage.is_cnf(data_dir / "example.m2x.json")


def test_load_model_detects_the_format(storage, data_dir, write_file):
    assert isinstance(storage.load_model(data_dir / "example.m2x.json"), Max2XorProblem)
    ising = write_file("model.ising.json", json.dumps(IsingModel(2, {1: 1}).to_json()))
    assert isinstance(storage.load_model(ising), IsingModel)
    qubo = write_file("model.qubo", QuboModel(2, {1: 2}, {(1, 2): -2}).to_text())
    assert isinstance(storage.load_model(qubo), QuboModel)


def test_example_model(storage, data_dir, worked_example):
    assert storage.load_model(data_dir / "example.m2x.json") == worked_example


def test_malformed_json(storage, write_file):
    with pytest.raises(ModelFormatError):
        storage.load_model(write_file("broken.json", "{\"num_vars\": "))
    with pytest.raises(ModelFormatError):
        storage.load_placement(write_file("broken.placement", "{\"1\": \"a\"}"))


def test_save_model_round_trip(storage, tmp_path, worked_example):
    path = tmp_path / "out" / "problem.json"
    storage.save_model(path, worked_example)
    assert storage.load_model(path) == worked_example
    assert not (tmp_path / "out" / "problem.json.tmp").exists()


def test_load_placement(storage, write_file):
    assert storage.load_placement(write_file("p.json", "{\"1\": 4, \"2\": 5}")) == {1: 4, 2: 5}
    assert storage.load_placement(write_file("p.txt", "# var qubit\n1 4\n2 5\n")) == {1: 4, 2: 5}
    with pytest.raises(ModelFormatError):
        storage.load_placement(write_file("bad.txt", "1 4 7\n"))
