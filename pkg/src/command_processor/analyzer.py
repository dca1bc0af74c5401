"""
This module contains the Analyzer class, which studies the coordinate surfaces of a chart.
"""

import numpy as np

from command_processor.chart_processor import ChartProcessor
from combescure import CombescureTriple
from surface_geometry import (
    analyze_family,
    check_G_condition,
    check_surface_point_solution,
    extract_slice,
    restrict_triple,
)


def default_slices(system, axes) -> list:
    """
    One slice per requested family, through the middle of the grid.
    """
    return [[axis, system.grid.counts[axis - 1] // 2] for axis in axes]


class Analyzer(ChartProcessor):
    """
    Classifies the coordinate families (parallel, totally umbilic, cyclic, torsion of the
    orthogonal curves) and checks the surface point equation on selected slices. On Guichard
    charts with closed-form associated multipliers the G-surface condition is checked as well.
    Only the slice checks decide the exit code; the family classification is informational.
    """

    def _process(self, config, chart, system):
        axes = config.params.get("axes", [1, 2, 3])
        families = [analyze_family(system, axis).to_dict() for axis in axes]

        multipliers = chart.associated_multipliers(*system.grid.mesh())
        triple = None if multipliers is None else CombescureTriple(np.asarray(multipliers), system)

        reports = []
        for axis, index in config.params.get("slices") or default_slices(system, axes):
            surface = extract_slice(system, axis, index)
            prefix = f"slice{axis}_{index}"
            reports.append(check_surface_point_solution(surface, surface.f).renamed(f"{prefix}.point_equation.f"))
            theta = surface.restrict(system.H[axis - 1])
            reports.append(check_surface_point_solution(surface, theta).renamed(f"{prefix}.point_equation.theta"))
            if triple is not None:
                condition = check_G_condition(surface, restrict_triple(triple, axis, index), surface.epsilon)
                reports.append(condition.fixed.renamed(f"{prefix}.g_condition"))
        return reports, {"families": families}
