"""
Utility module for writing run artifacts: JSON reports, CSV field dumps and OBJ meshes.

Functions:
  dump_report(report: dict) -> str:
    Serializes a report deterministically.

  write_json_report(path: str, report: dict) -> str:
    Writes a report to a JSON file.

  write_scalar_csv(path: str, mesh: tuple, values) -> str:
    Writes a sampled scalar field with header i,j,k,x,y,z,value.

  write_obj(path: str, vertices) -> str:
    Writes a lattice of vertices as a triangulated ASCII OBJ mesh.
"""

import csv
import json
import os

import numpy as np

CSV_HEADER = ["i", "j", "k", "x", "y", "z", "value"]


def _ensure_parent(path: str):
    directory = os.path.dirname(os.path.abspath(path))
    if not os.path.exists(directory):
        os.makedirs(directory)


def dump_report(report: dict) -> str:
    """
    Serializes a report with sorted keys so that identical runs give identical bytes.

    Args:
      report (dict): JSON-serializable report.

    Returns:
      str: The JSON text, newline terminated.
    """
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json_report(path: str, report: dict) -> str:
    """
    Writes a report to `path` and returns the path.
    """
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8") as file:
        file.write(dump_report(report))
    return path


def write_scalar_csv(path: str, mesh: tuple, values) -> str:
    """
    Writes one row per lattice node in row-major (i, j, k) order.

    Args:
      path (str): Output file.
      mesh (tuple): Coordinate arrays (X, Y, Z) with "ij" indexing.
      values: Sampled values with the shape of the mesh arrays.

    Returns:
      str: The path written.
    """
    values = np.asarray(values, dtype=float)
    _ensure_parent(path)
    with open(path, "w", newline="", encoding="utf-8") as file:
        writer = csv.writer(file)
        writer.writerow(CSV_HEADER)
        for node in np.ndindex(values.shape):
            writer.writerow(
                list(node) + [repr(float(axis[node])) for axis in mesh] + [repr(float(values[node]))]
            )
    return path


def write_obj(path: str, vertices) -> str:
    """
    Writes `v x y z` lines for a (3, n, m) vertex lattice followed by `f` lines, each lattice
    quad split into two triangles. Indices are 1-based.
    """
    vertices = np.asarray(vertices, dtype=float)
    if vertices.ndim != 3 or vertices.shape[0] != 3:
        raise ValueError(f"Expected a (3, n, m) vertex lattice, got {vertices.shape}")
    rows, columns = vertices.shape[1:]

    _ensure_parent(path)
    with open(path, "w", encoding="utf-8") as file:
        for a in range(rows):
            for b in range(columns):
                x, y, z = vertices[:, a, b]
                file.write(f"v {x:.12g} {y:.12g} {z:.12g}\n")
        for a in range(rows - 1):
            for b in range(columns - 1):
                corner = a * columns + b + 1
                right, below = corner + 1, corner + columns
                file.write(f"f {corner} {below} {below + 1}\n")
                file.write(f"f {corner} {below + 1} {right}\n")
    return path
