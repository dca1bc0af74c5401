"""
Base class of the processors that sample a catalog chart and report residual checks.
"""

from abc import abstractmethod

from catalog import instantiate, sample
from charts.chart_interface import AnalyticChart
from command_processor.command_processor_interface import CommandProcessorInterface
from config import REPORT_SCHEMA_VERSION
from exceptions.error import ConfigError
from grid import GridSpec
from logger import get_logger
from residuals import all_passed
from run_config import RunConfig
from tos_core import OrthogonalSystem

logger = get_logger(__name__)


def build_result(config: RunConfig, reports: list, grid: GridSpec | None = None, **extras) -> dict:
    """
    Assembles the JSON run report: schema version, operation, chart, grid, the residual
    reports and their overall verdict.
    """
    result = {
        "schema": REPORT_SCHEMA_VERSION,
        "operation": config.operation,
        "reports": [report.to_dict() for report in reports],
        "pass": all_passed(reports),
    }
    if config.chart is not None:
        result["chart"] = {"name": config.chart, "params": dict(config.chart_params)}
    if grid is not None:
        result["grid"] = grid.summary()
    result.update(extras)
    return result


class ChartProcessor(CommandProcessorInterface):
    """
    Samples the configured chart on the configured grid and hands the system to `_process`.
    """

    def execute(self, config: RunConfig) -> dict:
        if config.chart is None:
            raise ConfigError(f"Operation {config.operation} needs a chart")
        chart = instantiate(config.chart, config.chart_params)
        grid = config.grid_spec(chart)
        logger.info("Running %s on chart %s with grid %s", config.operation, chart.name, grid.counts)
        system = sample(chart, grid)
        reports, extras = self._process(config, chart, system)
        result = build_result(config, reports, grid, **extras)
        logger.info("%s finished, pass=%s", config.operation, result["pass"])
        return result

    @staticmethod
    def base_node(config: RunConfig) -> tuple:
        return tuple(config.params.get("base_node", (0, 0, 0)))

    @abstractmethod
    def _process(self, config: RunConfig, chart: AnalyticChart, system: OrthogonalSystem) -> tuple[list, dict]:
        """
        Runs the operation on a sampled system.

        Returns:
            tuple: the residual reports deciding the exit code and extra report entries.
        """
        raise NotImplementedError("Subclasses must implement this method")
