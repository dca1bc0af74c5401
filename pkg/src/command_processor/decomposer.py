"""
This module contains the Decomposer class, which splits a Ribaucour transform of a chart into
Combescure transform, inversion and Combescure transform.
"""

from command_processor.backlund_processor import bianchi_solution
from command_processor.chart_processor import ChartProcessor
from ribaucour import check_sphere_congruence, decompose_ribaucour, induce_ribaucour_family


class Decomposer(ChartProcessor):
    """
    Decomposes the Ribaucour transform given either by Bianchi data ("bianchi", default) or by
    the inversion data gamma_i = f . N_i, phi = |f|^2/2 + lambda ("inversion").
    """

    def _process(self, config, chart, system):
        lam = config.params.get("lambda", 0.0)
        if config.params.get("data", "bianchi") == "bianchi":
            bianchi, _ = bianchi_solution(config, system)
            data = bianchi.ribaucour_data(system, lam)
        else:
            data = induce_ribaucour_family(system, system, lam, base_node=self.base_node(config))

        decomposition = decompose_ribaucour(system, data)
        transformed = decomposition.transformed
        reports = (
            list(decomposition.reports)
            + list(transformed.diagnostics.values())
            + list(check_sphere_congruence(system, data, transformed))
        )
        return reports, {"degenerate": transformed.degenerate}
