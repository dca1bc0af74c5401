"""
Registry of closed-form reference charts and their sampling onto grids.

Functions:
    instantiate: creates a chart by name (hyphens and underscores are interchangeable).
    sample: evaluates a chart on a GridSpec as an OrthogonalSystem with exact H, dH and beta.
    list_charts: registry metadata.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from charts.chart_interface import AnalyticChart
from charts.flat import FlatGuichardChart
from charts.six_sphere import SixSphereAssociatedChart, SixSphereChart, SixSphereDualChart
from charts.spherical import SphericalControlChart
from exceptions.error import ChartNotFoundError, DomainError
from grid import GridSpec, check_node, integrate_gradient
from logger import get_logger
from residuals import nonvanishing
from tos_core import OrthogonalSystem

logger = get_logger(__name__)

CHARTS = {
    chart.name: chart
    for chart in (
        FlatGuichardChart,
        SixSphereChart,
        SixSphereAssociatedChart,
        SixSphereDualChart,
        SphericalControlChart,
    )
}

BOX_SLACK = 1e-12


def normalize_name(name: str) -> str:
    return name.strip().replace("-", "_")


def instantiate(name: str, params: dict | None = None) -> AnalyticChart:
    """
    Creates a chart from the registry.

    Args:
        name (str): Chart name, e.g. "six_sphere" or "six-sphere".
        params (dict, optional): Chart parameters, e.g. {"c": 0.5}.

    Returns:
        AnalyticChart: The chart.

    Raises:
        ChartNotFoundError: If the name is not registered.
        DomainError: If a parameter is unknown or not finite.
    """
    chart_class = CHARTS.get(normalize_name(name))
    if chart_class is None:
        raise ChartNotFoundError(f"Unknown chart '{name}', available: {', '.join(sorted(CHARTS))}")
    params = dict(params or {})
    unknown = set(params) - set(chart_class.parameter_names)
    if unknown:
        raise DomainError(f"Chart {chart_class.name} has no parameters {sorted(unknown)}")
    for key, value in params.items():
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            raise DomainError(f"Parameter {key}={value!r} of chart {chart_class.name} is not a finite number")
    return chart_class({key: float(value) for key, value in params.items()})


def check_domain(chart: AnalyticChart, grid: GridSpec):
    """
    Raises DomainError when the grid leaves the chart's recommended box.
    """
    for axis, (a, b, lower, upper) in enumerate(zip(grid.lower, grid.upper, chart.lower, chart.upper), start=1):
        if a < lower - BOX_SLACK or b > upper + BOX_SLACK:
            raise DomainError(
                f"Grid axis {axis} [{a}, {b}] leaves the box [{lower}, {upper}] of chart {chart.name}"
            )


def sample(
    chart: AnalyticChart,
    grid: GridSpec,
    base_node: Sequence[int] = (0, 0, 0),
    base_point: Sequence[float] | None = None,
) -> OrthogonalSystem:
    """
    Evaluates a chart on a grid. H, dH, N and beta come from the closed forms; f as well when
    the chart has a closed-form parametrization, otherwise f is integrated from df = sum H_i N_i dx_i
    and anchored at `base_point` (default: the origin) on `base_node`.
    """
    check_domain(chart, grid)
    x, y, z = grid.mesh()
    H = chart.lame(x, y, z)
    dH = chart.lame_gradient(x, y, z)
    N = chart.frame(x, y, z)
    beta = chart.rotational(x, y, z)
    for name, values in (("H", H), ("dH", dH), ("N", N), ("beta", beta)):
        if not np.all(np.isfinite(values)):
            raise DomainError(f"Chart {chart.name} is singular on the grid ({name} not finite)")

    f = chart.position(x, y, z)
    if f is None:
        base_node = check_node(grid, base_node)
        anchor = np.zeros(3) if base_point is None else np.asarray(base_point, dtype=float)
        f = integrate_gradient(H[:, None] * N, grid.spacing, base_node, anchor)

    degenerate = not bool(nonvanishing(H).all())
    if degenerate:
        logger.warning("Chart %s has vanishing Lame coefficients on the grid", chart.name)
    logger.info("Sampled chart %s %s on grid %s", chart.name, chart.params, grid.counts)
    return OrthogonalSystem(
        grid=grid,
        f=f,
        H=H,
        N=N,
        beta=beta,
        dH=dH,
        provenance={"chart": chart.name, "params": dict(chart.params)},
        degenerate=degenerate,
    )


def chart_of(system: OrthogonalSystem) -> AnalyticChart | None:
    """
    Returns the chart a system was sampled from, or None for constructed systems.
    """
    name = system.provenance.get("chart")
    if name is None:
        return None
    return instantiate(name, system.provenance.get("params"))


def list_charts() -> list[dict]:
    """
    Returns the metadata of every registered chart with default parameters.
    """
    return [CHARTS[name]().describe() for name in sorted(CHARTS)]
