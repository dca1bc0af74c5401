"""
This module contains the Verifier class, which runs the residual checks of a sampled chart.
"""

from command_processor.chart_processor import ChartProcessor
from exceptions.error import ConfigError
from guichard import check_guichard
from tos_core import (
    PAIRS,
    check_frame_system,
    check_gauss_equation,
    check_lame,
    check_lame_beta,
    check_orthogonality,
    check_point_equation,
    classify_chi,
)

DEFAULT_CHECKS = ("orthogonality", "lame", "guichard")


def _point_equations(system):
    return [check_point_equation(system, (i + 1, j + 1)) for i, j in PAIRS]


CHECKS = {
    "orthogonality": check_orthogonality,
    "lame": check_lame,
    "lame_beta": check_lame_beta,
    "frame": check_frame_system,
    "gauss": lambda system: [check_gauss_equation(system)],
    "guichard": check_guichard,
    "point_equation": _point_equations,
}


class Verifier(ChartProcessor):
    """
    Runs the requested checks ("orthogonality", "lame", "guichard", ...) on a chart. The "chi"
    check classifies the trace H1^2 + H2^2 - H3^2 and reports the deciding residual.
    """

    def _process(self, config, chart, system):
        checks = config.params.get("checks", DEFAULT_CHECKS)
        unknown = [name for name in checks if name not in CHECKS and name != "chi"]
        if unknown:
            raise ConfigError(f"Unknown checks {unknown}")

        reports, extras = [], {}
        for name in checks:
            if name == "chi":
                classification = classify_chi(system)
                reports.append(classification.reports[-1])
                extras["classification"] = {
                    "kind": classification.kind,
                    "constant": classification.constant,
                }
                continue
            reports.extend(CHECKS[name](system))
        return reports, extras
