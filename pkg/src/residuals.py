"""
Residual reports and the tolerance policy shared by every check.

A residual is one or more arrays whose trailing axes are the lattice axes of a grid
(three for a GridSpec, two for a coordinate-surface slice). A report reduces them to
sup/RMS norms over an evaluation region that optionally drops a boundary collar and
masked (singular) nodes, and compares the sup norm with

    tau = max(floor, factor * h^2 * scale)

where h is the largest spacing and scale the sup of the terms entering the residual.

Classes:
    TolerancePolicy: numerical settings of one run.
    ResidualReport: named residual summary, serialized into the JSON run report.

Functions:
    tolerance_policy: context manager overriding the active policy.
    residual_report: builds a ResidualReport from residual arrays.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from config import NUMERICS_CONFIGURATIONS


@dataclass(frozen=True)
class TolerancePolicy:
    """
    Numerical settings of a run: tolerance factor and floor, boundary collar, gate factor,
    pointwise gate, mask threshold and default derivative order. A `collar_width` measures the
    collar in coordinate units and supersedes the node count, so that grids of different
    resolution are compared over the same sub-box.
    """

    factor: float
    floor: float
    collar: int
    gate_factor: float
    pointwise_gate: float
    mask_threshold: float
    derivative_order: int
    collar_width: float | None = None

    def tolerance(self, spacing: Sequence[float], scale: float) -> float:
        """
        Returns max(floor, factor * h^2 * scale) with h the largest spacing.
        """
        return max(self.floor, self.factor * max(spacing) ** 2 * scale)

    def pointwise_tolerance(self, scale: float) -> float:
        """
        Grid-independent bound max(floor, pointwise_gate * scale) for identities evaluated
        without differencing.
        """
        return max(self.floor, self.pointwise_gate * scale)

    def collar_nodes(self, spacing: Sequence[float]) -> tuple[int, ...]:
        """
        Returns the collar of each lattice axis in nodes.
        """
        if self.collar_width is None:
            return (self.collar,) * len(spacing)
        return tuple(int(round(self.collar_width / h)) for h in spacing)


DEFAULT_POLICY = TolerancePolicy(
    factor=NUMERICS_CONFIGURATIONS["tolerance_factor"],
    floor=NUMERICS_CONFIGURATIONS["tolerance_floor"],
    collar=NUMERICS_CONFIGURATIONS["collar"],
    gate_factor=NUMERICS_CONFIGURATIONS["gate_factor"],
    pointwise_gate=NUMERICS_CONFIGURATIONS["pointwise_gate"],
    mask_threshold=NUMERICS_CONFIGURATIONS["mask_threshold"],
    derivative_order=NUMERICS_CONFIGURATIONS["derivative_order"],
)

_ACTIVE_POLICY = contextvars.ContextVar("orthonet_tolerance_policy", default=DEFAULT_POLICY)


def current_policy() -> TolerancePolicy:
    """
    Returns the tolerance policy active in the current context.
    """
    return _ACTIVE_POLICY.get()


@contextlib.contextmanager
def tolerance_policy(**overrides):
    """
    Temporarily overrides fields of the active tolerance policy. None values are ignored.

    Example:
        with tolerance_policy(factor=10, collar=0):
            report = check_guichard(system)
    """
    changes = {key: value for key, value in overrides.items() if value is not None}
    token = _ACTIVE_POLICY.set(replace(current_policy(), **changes))
    try:
        yield current_policy()
    finally:
        _ACTIVE_POLICY.reset(token)


@dataclass(frozen=True)
class ResidualReport:
    """
    Named residual summary. `passed` holds iff sup <= tolerance. `pointwise` marks identities
    evaluated without differencing; `scale` is the magnitude their gate is relative to.
    """

    name: str
    sup: float
    rms: float
    tolerance: float
    passed: bool
    collar_excluded: bool
    grid: dict
    masked_fraction: float = 0.0
    worst_node: tuple[int, ...] | None = None
    details: dict = field(default_factory=dict)
    scale: float = 1.0
    pointwise: bool = False

    def to_dict(self) -> dict:
        """
        Serializes the report with the JSON key names of the run report schema.
        """
        data = {
            "name": self.name,
            "sup": _json_float(self.sup),
            "rms": _json_float(self.rms),
            "tolerance": _json_float(self.tolerance),
            "pass": bool(self.passed),
            "grid": self.grid,
            "collar_excluded": bool(self.collar_excluded),
            "masked_fraction": _json_float(self.masked_fraction),
        }
        if self.worst_node is not None:
            data["worst_node"] = [int(i) for i in self.worst_node]
        if self.details:
            data["details"] = self.details
        return data

    def renamed(self, name: str) -> ResidualReport:
        """
        Returns a copy carrying another name.
        """
        return replace(self, name=name)


def _json_float(value: float) -> float | None:
    value = float(value)
    return value if math.isfinite(value) else None


def _spatial_magnitude(array, ndim: int) -> np.ndarray:
    values = np.abs(np.asarray(array, dtype=float))
    if values.ndim < ndim:
        raise ValueError("Residual has fewer axes than the grid it lives on")
    spatial_shape = values.shape[values.ndim - ndim :]
    values = values.reshape((-1,) + spatial_shape)
    values = np.where(np.isfinite(values), values, np.inf)
    return values.max(axis=0)


def _evaluation_region(shape: tuple[int, ...], collars: Sequence[int]) -> tuple[np.ndarray, bool]:
    region = np.ones(shape, dtype=bool)
    if max(collars) <= 0 or any(n <= 2 * collar for n, collar in zip(shape, collars)):
        return region, False
    region[...] = False
    region[tuple(slice(collar, n - collar) for n, collar in zip(shape, collars))] = True
    return region, True


def field_scale(*arrays) -> float:
    """
    Returns the largest finite absolute value over the given arrays (0 when all are empty).
    """
    scale = 0.0
    for array in arrays:
        values = np.abs(np.asarray(array, dtype=float))
        values = values[np.isfinite(values)]
        if values.size:
            scale = max(scale, float(values.max()))
    return scale


def nonvanishing(values, ndim: int = 3, threshold: float | None = None) -> np.ndarray:
    """
    Boolean mask of the nodes where every leading component of `values` is bounded away
    from zero relative to its scale.

    Args:
        values: array whose trailing `ndim` axes are lattice axes; leading axes are reduced with all().
        ndim (int): number of lattice axes.
        threshold (float, optional): relative threshold, defaults to the policy mask threshold.
    """
    if threshold is None:
        threshold = current_policy().mask_threshold
    values = np.asarray(values, dtype=float)
    scale = field_scale(values) or 1.0
    mask = np.abs(values) > threshold * scale
    mask = mask.reshape((-1,) + values.shape[values.ndim - ndim :])
    return mask.all(axis=0)


def residual_report(
    name: str,
    residuals: Iterable,
    *,
    spacing: Sequence[float],
    grid_summary: dict,
    terms: Iterable = (),
    scale: float | None = None,
    tolerance: float | None = None,
    mask=None,
    collar: int | None = None,
    details: dict | None = None,
    pointwise: bool = False,
) -> ResidualReport:
    """
    Reduces residual arrays to a ResidualReport.

    Args:
        name (str): Report name.
        residuals: arrays whose trailing len(spacing) axes are lattice axes.
        spacing: lattice spacings, one per lattice axis.
        grid_summary (dict): grid description embedded in the report.
        terms: arrays of the individual terms of the residual; their sup is the scale.
        scale (float, optional): explicit scale, supersedes `terms`.
        tolerance (float, optional): explicit tolerance, supersedes the policy.
        mask: boolean lattice array of the nodes to evaluate.
        collar (int, optional): boundary nodes to drop, defaults to the policy collar.
        details (dict, optional): extra JSON-serializable information.
        pointwise (bool): the identity is evaluated without differencing, see exceeds_gate.

    Returns:
        ResidualReport: the report.
    """
    policy = current_policy()
    ndim = len(spacing)
    fields = [_spatial_magnitude(residual, ndim) for residual in residuals]
    if not fields:
        raise ValueError(f"No residual arrays given for report {name}")
    magnitude = np.maximum.reduce(fields) if len(fields) > 1 else fields[0]

    collars = policy.collar_nodes(spacing) if collar is None else (collar,) * ndim
    region, collar_excluded = _evaluation_region(magnitude.shape, collars)
    valid = region if mask is None else region & np.broadcast_to(mask, magnitude.shape)
    details = dict(details or {})
    masked_fraction = 1.0 - valid.sum() / region.sum()

    if valid.any():
        values = magnitude[valid]
        sup = float(values.max())
        rms = float(np.sqrt(np.mean(np.square(values)))) if math.isfinite(sup) else math.inf
        worst_node = np.unravel_index(
            int(np.argmax(np.where(valid, magnitude, -1.0))), magnitude.shape
        )
    else:
        sup, rms, worst_node = 0.0, 0.0, None
        details.setdefault("degenerate", "empty evaluation mask")

    if scale is None:
        term_fields = [_spatial_magnitude(term, ndim) for term in terms]
        if term_fields:
            scale = field_scale(*(term[valid] for term in term_fields))
        else:
            scale = 1.0
    if tolerance is None:
        tolerance = policy.tolerance(spacing, scale)

    return ResidualReport(
        name=name,
        sup=sup,
        rms=rms,
        tolerance=float(tolerance),
        passed=bool(math.isfinite(sup) and sup <= tolerance),
        collar_excluded=collar_excluded,
        grid=grid_summary,
        masked_fraction=float(masked_fraction),
        worst_node=None if worst_node is None else tuple(int(i) for i in worst_node),
        details=details,
        scale=float(scale),
        pointwise=pointwise,
    )


def exceeds_gate(report: ResidualReport) -> bool:
    """
    Returns True when a report fails by more than the gate factor; construction steps
    raise on such failures, plain checks only report them. Pointwise identities are gated
    at the smaller of that and the grid-independent bound pointwise_gate * scale.
    """
    policy = current_policy()
    if not math.isfinite(report.sup):
        return True
    threshold = policy.gate_factor * report.tolerance
    if report.pointwise:
        threshold = min(threshold, policy.pointwise_tolerance(report.scale))
    return report.sup > threshold


def all_passed(reports: Iterable[ResidualReport]) -> bool:
    """
    Returns True when every report passed.
    """
    return all(report.passed for report in reports)
