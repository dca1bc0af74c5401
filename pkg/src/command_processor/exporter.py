"""
This module contains the Exporter class, which writes coordinate surfaces as OBJ meshes and
sampled fields as CSV files.
"""

import os

from command_processor.chart_processor import ChartProcessor
from exceptions.error import ConfigError
from grid import ScalarField, dump_csv
from tos_core import OrthogonalSystem, chi_trace, export_slice_obj

CSV_FIELDS = ("chi", "H1", "H2", "H3")


def csv_field(system: OrthogonalSystem, name: str) -> ScalarField:
    """
    Returns the sampled field exported under `name`.

    Raises:
        ConfigError: if `name` is not one of CSV_FIELDS.
    """
    if name not in CSV_FIELDS:
        raise ConfigError(f"Unknown CSV field '{name}', available: {', '.join(CSV_FIELDS)}")
    if name == "chi":
        return chi_trace(system)
    return ScalarField(system.grid, system.H[CSV_FIELDS.index(name) - 1])


class Exporter(ChartProcessor):
    """
    Writes one OBJ file per requested slice (default: the middle x_3 = const surface) and one
    CSV file per requested field ("chi", "H1", "H2", "H3") into the output directory.
    """

    def _process(self, config, chart, system):
        directory = config.output_directory
        fields = {name: csv_field(system, name) for name in config.params.get("csv", [])}
        slices = config.params.get("slices") or [[3, system.grid.counts[2] // 2]]
        artifacts = []
        for axis, index in slices:
            path = os.path.join(directory, f"{chart.name}_slice{axis}_{index}.obj")
            artifacts.append(export_slice_obj(system, axis, index, path))
        for name, field in fields.items():
            artifacts.append(dump_csv(field, os.path.join(directory, f"{chart.name}_{name}.csv")))
        return [], {"artifacts": artifacts}
