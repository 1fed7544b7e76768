import csv
import json
from typing import Optional

import numpy as np
import pytest
from pydantic import BaseModel

from app.core.exceptions import ConfigInvalidError
from app.schemas import ComplexField, ExperimentConfig, Grid1D, ModelKind, Representation
from app.utils.serialization import flatten, read_field, write_field, write_rows_csv, write_sidecar


class Inner(BaseModel):
    a: float
    b: Optional[ModelKind] = None


class Outer(BaseModel):
    name: str
    flag: bool
    inner: Optional[Inner] = None


def test_flatten_inlines_nested_models():
    row = Outer(name="x", flag=True, inner=Inner(a=0.1, b=ModelKind.MP))
    assert flatten(row) == {"name": "x", "flag": True, "a": 0.1, "b": ModelKind.MP}
    assert flatten(Outer(name="y", flag=False)) == {"name": "y", "flag": False, "a": None, "b": None}


def test_csv_cells(tmp_path):
    path = write_rows_csv(
        tmp_path / "rows" / "out.csv",
        Outer,
        [Outer(name="x", flag=True, inner=Inner(a=0.1, b=ModelKind.AR)), Outer(name="y", flag=False)],
    )
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows == [
        ["name", "flag", "a", "b"],
        ["x", "true", "0.1", "ar"],
        ["y", "false", "", ""],
    ]


def test_floats_round_trip_through_csv(tmp_path):
    value = 1.0 / 3.0
    path = write_rows_csv(tmp_path / "out.csv", Inner, [Inner(a=value)])
    _, row = path.read_text().splitlines()
    assert float(row.split(",")[0]) == value


def test_empty_table_keeps_its_header(tmp_path):
    path = write_rows_csv(tmp_path / "empty.csv", Outer, [])
    assert path.read_text() == "name,flag,a,b\n"


def test_sidecar(tmp_path):
    config = ExperimentConfig.model_validate({"model": "ar", "sweep": {"e_total": [1.0], "plateau": [0.1]}})
    path = write_sidecar(tmp_path / "run.json", config, summary=Inner(a=2.0), note="ok")
    payload = json.loads(path.read_text())
    assert list(payload) == ["config", "note", "summary"]
    assert payload["config"]["model"] == "ar"
    assert payload["summary"] == {"a": 2.0, "b": None}


@pytest.fixture
def field() -> ComplexField:
    grid = Grid1D(lo=-2.0, hi=2.0, n=16)
    amps = np.exp(-grid.points**2) * np.exp(0.3j * grid.points)
    return ComplexField(grid=grid, amps=amps)


@pytest.mark.parametrize("name", ["field.txt", "field.npz"])
def test_field_files(tmp_path, field, name):
    back = read_field(write_field(tmp_path / name, field))
    assert back.grid == field.grid
    assert back.representation is Representation.POSITION
    np.testing.assert_array_equal(back.amps, field.amps)


def test_text_field_layout(tmp_path, field):
    lines = write_field(tmp_path / "field.txt", field).read_text().splitlines()
    assert lines[0] == "# representation position"
    assert lines[4] == "# point real imag"
    assert len(lines) == 5 + field.grid.n


def test_field_suffix(tmp_path, field):
    with pytest.raises(ConfigInvalidError):
        write_field(tmp_path / "field.dat", field)
