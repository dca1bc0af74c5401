"""
Run configurations of the orthonet command line.

A RunConfig is the JSON document described by schema/run_config_schema.json; flags given on the
command line are translated into the same document, so every run can be replayed from a file.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from jsonschema import ValidationError, validate

from charts.chart_interface import AnalyticChart
from config import OUTPUT_DIRECTORY, RUN_CONFIG_SCHEMA
from exceptions.error import ConfigError
from grid import GridSpec
from utils.parsers import parse_json_file

DEFAULT_RESOLUTION = 33


@dataclass(frozen=True)
class RunConfig:
    """
    A validated run configuration.
    """

    operation: str
    chart: str | None = None
    chart_params: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    tolerance: dict = field(default_factory=dict)
    report: str | None = None
    output_directory: str = OUTPUT_DIRECTORY

    @classmethod
    def from_dict(cls, data: dict) -> RunConfig:
        """
        Validates a configuration document against the run config schema.

        Raises:
            ConfigError: If the document violates the schema.
        """
        try:
            validate(instance=data, schema=parse_json_file(RUN_CONFIG_SCHEMA))
        except ValidationError as e:
            location = "/".join(str(part) for part in e.absolute_path) or "<root>"
            raise ConfigError(f"Invalid run configuration at {location}: {e.message}") from e

        chart = data.get("chart") or {}
        output = data.get("output") or {}
        return cls(
            operation=data["operation"],
            chart=chart.get("name"),
            chart_params=dict(chart.get("params") or {}),
            grid=dict(data.get("grid") or {}),
            params=dict(data.get("params") or {}),
            tolerance=dict(data.get("tolerance") or {}),
            report=output.get("report"),
            output_directory=output.get("directory", OUTPUT_DIRECTORY),
        )

    @classmethod
    def from_file(cls, path: str) -> RunConfig:
        data = parse_json_file(path)
        if not isinstance(data, dict):
            raise ConfigError(f"Run configuration {path} must be a JSON object")
        return cls.from_dict(data)

    def grid_spec(self, chart: AnalyticChart) -> GridSpec:
        """
        Resolves the grid, defaulting the box to the chart's box and the resolution to
        DEFAULT_RESOLUTION nodes per axis.
        """
        counts = self.grid.get("counts") or [self.grid.get("n", DEFAULT_RESOLUTION)] * 3
        return GridSpec(
            tuple(self.grid.get("lower", chart.lower)),
            tuple(self.grid.get("upper", chart.upper)),
            tuple(counts),
        )

    def to_dict(self) -> dict:
        data = {"operation": self.operation}
        if self.chart is not None:
            data["chart"] = {"name": self.chart, "params": dict(self.chart_params)}
        for key in ("grid", "params", "tolerance"):
            if getattr(self, key):
                data[key] = dict(getattr(self, key))
        return data
