"""
This module contains the Associator class, which builds a member of the associated family
of a Guichard chart.
"""

from command_processor.chart_processor import ChartProcessor
from guichard import build_associated
from tos_core import classify_chi


class Associator(ChartProcessor):
    """
    Builds the associated system of parameter c and checks that it is a 1-system.
    """

    def _process(self, config, chart, system):
        c = config.params.get("c", 0.0)
        family, member = build_associated(
            system,
            c,
            base_node=self.base_node(config),
            h3_base_value=config.params.get("h3_base_value"),
        )
        classification = classify_chi(member)
        reports = list(member.diagnostics.values()) + [classification.reports[-1]]
        return reports, {
            "family": family.describe(),
            "degenerate": member.degenerate,
            "classification": {"kind": classification.kind, "constant": classification.constant},
        }
