"""
This module contains the ChartLister class, which lists the chart registry.
"""

from catalog import list_charts
from command_processor.chart_processor import build_result
from command_processor.command_processor_interface import CommandProcessorInterface


class ChartLister(CommandProcessorInterface):
    """
    Returns the metadata of every catalog chart.
    """

    def execute(self, config) -> dict:
        return build_result(config, [], charts=list_charts())
