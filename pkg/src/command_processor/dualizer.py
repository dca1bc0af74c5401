"""
This module contains the Dualizer class, which builds the dual Guichard net of a chart.
"""

from command_processor.chart_processor import ChartProcessor
from guichard import build_associated, build_dual, check_dual_guichard_relation, check_gsystem_relation


class Dualizer(ChartProcessor):
    """
    Builds the associated system and the dual system of parameter c and checks the
    G-system relations between seed, associated and dual.
    """

    def _process(self, config, chart, system):
        c = config.params.get("c", 0.0)
        base_node = self.base_node(config)
        family, member = build_associated(
            system, c, base_node=base_node, h3_base_value=config.params.get("h3_base_value")
        )
        dual = build_dual(system, family, c)
        reports = list(dual.diagnostics.values()) + [
            check_gsystem_relation(system, member, dual),
            check_dual_guichard_relation(member, dual),
        ]
        return reports, {"family": family.describe(), "degenerate": dual.degenerate}
