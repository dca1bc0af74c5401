"""
This module contains the BacklundProcessor class, which integrates Bianchi's system on a
Guichard chart and applies the Backlund-type transform.
"""

from command_processor.chart_processor import ChartProcessor
from ribaucour import backlund, integrate_bianchi

DEFAULT_SEED = {"gamma": [1.0, 1.0, 0.0], "gammabar": [1.0, 1.0, 0.0]}


def bianchi_solution(config, system):
    """
    Integrates Bianchi's system with the configured alpha and seed.
    """
    seed = config.params.get("bianchi_seed", DEFAULT_SEED)
    return integrate_bianchi(
        system,
        config.params.get("alpha", 1.0),
        seed["gamma"],
        seed["gammabar"],
        base_node=tuple(config.params.get("base_node", (0, 0, 0))),
    )


class BacklundProcessor(ChartProcessor):
    """
    Runs the Backlund-type transform with the configured alpha and lambda.
    """

    def _process(self, config, chart, system):
        data, bar = bianchi_solution(config, system)
        transformed = backlund(system, bar, data.alpha, config.params.get("lambda", 0.0))
        reports = list(data.reports) + list(transformed.diagnostics.values())
        return reports, {
            "alpha": data.alpha,
            "lambda": float(config.params.get("lambda", 0.0)),
            "degenerate": transformed.degenerate,
        }
