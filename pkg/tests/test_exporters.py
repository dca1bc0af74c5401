import csv
import json
import math

import numpy as np
import pytest

from grid import GridSpec, ScalarField, dump_csv
from utils.exporters import CSV_HEADER, dump_report, write_json_report, write_obj


def test_dump_report_is_deterministic_and_rejects_nan():
    """
    Keys are sorted and the text is newline terminated; NaN is not valid JSON.
    """
    text = dump_report({"b": 1, "a": [1.5]})
    assert text == '{\n  "a": [\n    1.5\n  ],\n  "b": 1\n}\n'
    with pytest.raises(ValueError):
        dump_report({"sup": math.nan})


def test_write_json_report_creates_parent_directories(tmp_path):
    path = tmp_path / "nested" / "report.json"
    write_json_report(str(path), {"pass": True})
    assert json.loads(path.read_text()) == {"pass": True}


def test_dump_csv_rows(tmp_path):
    """
    One row per node in row-major order with coordinates and value.
    """
    grid = GridSpec.cube(0.0, 1.0, 5)
    X, Y, Z = grid.mesh()
    path = dump_csv(ScalarField(grid, X + 10 * Y + 100 * Z), str(tmp_path / "field.csv"))
    with open(path, newline="", encoding="utf-8") as file:
        rows = list(csv.reader(file))
    assert rows[0] == CSV_HEADER
    assert len(rows) == 1 + 125
    assert rows[2][:3] == ["0", "0", "1"]
    assert float(rows[2][5]) == pytest.approx(0.25)
    assert float(rows[-1][6]) == pytest.approx(111.0)


def test_write_obj_triangulates_the_lattice(tmp_path):
    x = np.linspace(0.0, 1.0, 3)
    X, Y = np.meshgrid(x, x, indexing="ij")
    path = write_obj(str(tmp_path / "slice.obj"), np.stack((X, Y, np.zeros_like(X))))
    lines = open(path, encoding="utf-8").read().splitlines()
    vertices = [line for line in lines if line.startswith("v ")]
    faces = [line for line in lines if line.startswith("f ")]
    assert len(vertices) == 9
    assert len(faces) == 8
    assert faces[0] == "f 1 4 5"
    with pytest.raises(ValueError):
        write_obj(str(tmp_path / "bad.obj"), np.zeros((2, 3, 3)))
