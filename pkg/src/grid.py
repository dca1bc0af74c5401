"""
Rectilinear 3-D grids, sampled fields, finite differences and path integration of 1-forms.

Conventions:
- Coordinates (x1, x2, x3) = (x, y, z); nodes are indexed row-major (i1, i2, i3).
- Arrays whose trailing three axes are the lattice axes carry sampled fields; leading axes
  (vector components, frame rows, ...) are free.
- Public operations number axes 1..3, array-level helpers use numpy axes.

Classes:
    GridSpec: the coordinate box and its sampling.
    ScalarField, VectorField, OneForm: sampled fields sharing one GridSpec.

Functions:
    difference: central finite differences (order 2 or 4) with 2nd-order one-sided boundaries.
    partial_derivative: difference of a ScalarField along axis 1..3.
    closedness_residual: antisymmetrized mixed partials of a OneForm.
    integrate_gradient: trapezoid accumulation of a gradient system along lattice lines.
    integrate_oneform: integrate_gradient for OneForms.
    dump_csv: CSV dump of a ScalarField.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid

from exceptions.error import GridError
from residuals import ResidualReport, current_policy, residual_report
from utils.exporters import write_scalar_csv

MIN_NODES = 5
SUPPORTED_ORDERS = (2, 4)


@dataclass(frozen=True)
class GridSpec:
    """
    Axis-aligned box [a_i, b_i] sampled with n_i >= 5 nodes per axis.
    """

    lower: tuple[float, float, float]
    upper: tuple[float, float, float]
    counts: tuple[int, int, int]

    def __post_init__(self):
        if not len(self.lower) == len(self.upper) == len(self.counts) == 3:
            raise GridError("A grid needs exactly three axes")
        object.__setattr__(self, "lower", tuple(float(a) for a in self.lower))
        object.__setattr__(self, "upper", tuple(float(b) for b in self.upper))
        object.__setattr__(self, "counts", tuple(int(n) for n in self.counts))
        for axis, (a, b, n) in enumerate(zip(self.lower, self.upper, self.counts), start=1):
            if n < MIN_NODES:
                raise GridError(f"Axis {axis} has {n} nodes, at least {MIN_NODES} are required")
            if not b > a:
                raise GridError(f"Axis {axis} has an empty interval [{a}, {b}]")

    @classmethod
    def cube(cls, lower: float, upper: float, count: int) -> GridSpec:
        """
        Returns the grid [lower, upper]^3 with `count` nodes per axis.
        """
        return cls((lower,) * 3, (upper,) * 3, (count,) * 3)

    @classmethod
    def from_dict(cls, data: dict) -> GridSpec:
        """
        Builds a grid from {"lower": [...], "upper": [...], "counts": [...]}.
        """
        try:
            return cls(tuple(data["lower"]), tuple(data["upper"]), tuple(data["counts"]))
        except (KeyError, TypeError) as e:
            raise GridError(f"Invalid grid description: {e}") from e

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.counts

    @property
    def spacing(self) -> tuple[float, float, float]:
        return tuple((b - a) / (n - 1) for a, b, n in zip(self.lower, self.upper, self.counts))

    def axis_values(self, axis: int) -> np.ndarray:
        """
        Returns the node coordinates along axis 1..3.
        """
        index = _axis_index(axis)
        return np.linspace(self.lower[index], self.upper[index], self.counts[index])

    def mesh(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Returns the coordinate arrays (X, Y, Z) with "ij" indexing.
        """
        return tuple(np.meshgrid(*(self.axis_values(axis) for axis in (1, 2, 3)), indexing="ij"))

    def contains(self, node: Sequence[int]) -> bool:
        return len(node) == 3 and all(0 <= int(i) < n for i, n in zip(node, self.counts))

    def node_coordinates(self, node: Sequence[int]) -> tuple[float, float, float]:
        """
        Returns the coordinates of a lattice node.
        """
        check_node(self, node)
        return tuple(a + int(i) * h for a, i, h in zip(self.lower, node, self.spacing))

    def nearest_node(self, point: Sequence[float]) -> tuple[int, int, int]:
        """
        Returns the lattice node closest to a coordinate point.
        """
        return tuple(
            int(np.clip(round((p - a) / h), 0, n - 1))
            for p, a, h, n in zip(point, self.lower, self.spacing, self.counts)
        )

    def summary(self) -> dict:
        return {
            "lower": list(self.lower),
            "upper": list(self.upper),
            "counts": list(self.counts),
            "spacing": list(self.spacing),
        }


def _axis_index(axis: int) -> int:
    if axis not in (1, 2, 3):
        raise GridError(f"Axis must be 1, 2 or 3, got {axis}")
    return axis - 1


def check_node(grid: GridSpec, node: Sequence[int]) -> tuple[int, int, int]:
    """
    Validates a lattice node and returns it as a tuple of ints.
    """
    if not grid.contains(node):
        raise GridError(f"Node {tuple(node)} is outside the grid {grid.counts}")
    return tuple(int(i) for i in node)


def _check_values(grid: GridSpec, values: np.ndarray, leading: tuple[int, ...]) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    expected = leading + grid.shape
    if values.shape != expected:
        raise GridError(f"Expected values of shape {expected}, got {values.shape}")
    if not np.all(np.isfinite(values)):
        raise GridError("Sampled values must be finite")
    return values


@dataclass(frozen=True)
class ScalarField:
    """
    One real value per lattice node.
    """

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _check_values(self.grid, self.values, ()))

    def at(self, node: Sequence[int]) -> float:
        return float(self.values[check_node(self.grid, node)])


@dataclass(frozen=True)
class VectorField:
    """
    Three ScalarFields sharing one grid, stored as an array of shape (3, n1, n2, n3).
    """

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _check_values(self.grid, self.values, (3,)))

    def component(self, index: int) -> ScalarField:
        """
        Returns component 1..3 as a ScalarField.
        """
        return ScalarField(self.grid, self.values[_axis_index(index)])

    def at(self, node: Sequence[int]) -> np.ndarray:
        return self.values[(slice(None),) + check_node(self.grid, node)]


@dataclass(frozen=True)
class OneForm:
    """
    omega = g1 dx + g2 dy + g3 dz with the coefficients stored as (3, n1, n2, n3).
    """

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _check_values(self.grid, self.values, (3,)))

    @classmethod
    def differential(cls, field: ScalarField, order: int | None = None) -> OneForm:
        """
        Returns dF of a sampled ScalarField.
        """
        return cls(field.grid, lattice_gradient(field.values, field.grid.spacing, order))

    def component(self, index: int) -> ScalarField:
        return ScalarField(self.grid, self.values[_axis_index(index)])


def difference(values, spacing: float, axis: int, order: int = 2) -> np.ndarray:
    """
    Finite-difference derivative of an array along one numpy axis.

    Interior nodes use central differences of the given order; the two boundary layers use
    the 2nd-order stencils of numpy.gradient (one-sided at the ends).

    Args:
        values: sampled array.
        spacing (float): node spacing along `axis`.
        axis (int): numpy axis.
        order (int): 2 or 4.

    Returns:
        np.ndarray: derivative with the shape of `values`.
    """
    if order not in SUPPORTED_ORDERS:
        raise GridError(f"Derivative order must be 2 or 4, got {order}")
    values = np.asarray(values, dtype=float)
    count = values.shape[axis]
    if count < (3 if order == 2 else MIN_NODES):
        raise GridError(f"{count} nodes are too few for an order-{order} stencil")

    result = np.gradient(values, spacing, axis=axis, edge_order=2)
    if order == 4:
        moved = np.moveaxis(values, axis, 0)
        out = np.moveaxis(result, axis, 0)
        out[2:-2] = (moved[:-4] - 8.0 * moved[1:-3] + 8.0 * moved[3:-1] - moved[4:]) / (
            12.0 * spacing
        )
    return result


def lattice_difference(values, spacing: Sequence[float], axis: int, order: int | None = None):
    """
    Derivative along lattice axis 0..d-1 of an array whose trailing len(spacing) axes are lattice axes.
    """
    order = current_policy().derivative_order if order is None else order
    values = np.asarray(values, dtype=float)
    numpy_axis = values.ndim - len(spacing) + axis
    return difference(values, spacing[axis], numpy_axis, order)


def lattice_gradient(values, spacing: Sequence[float], order: int | None = None) -> np.ndarray:
    """
    Stacks the derivatives along every lattice axis in a new leading axis.
    """
    return np.stack([lattice_difference(values, spacing, axis, order) for axis in range(len(spacing))])


def lattice_slice(values, axis: int, index: int) -> np.ndarray:
    """
    Restricts an array whose trailing three axes are lattice axes to the coordinate
    surface x_axis = const (axis 1..3); the two remaining lattice axes keep their order.
    """
    values = np.asarray(values)
    numpy_axis = values.ndim - 3 + _axis_index(axis)
    if not 0 <= index < values.shape[numpy_axis]:
        raise GridError(f"Slice index {index} is outside axis {axis}")
    return np.take(values, index, axis=numpy_axis)


def partial_derivative(field: ScalarField, axis: int, order: int | None = None) -> ScalarField:
    """
    Derivative of a ScalarField along axis 1..3 (order 2 by default, 4 opt-in).
    """
    index = _axis_index(axis)
    return ScalarField(field.grid, lattice_difference(field.values, field.grid.spacing, index, order))


def closedness_report(
    name: str, components, grid: GridSpec, collar: int | None = None, mask=None
) -> ResidualReport:
    """
    Closedness of stacked 1-forms: `components` has shape (3, ..., n1, n2, n3) with one
    coefficient per lattice axis; the middle axes are checked independently.
    """
    derivatives = lattice_gradient(components, grid.spacing, order=2)
    residuals, terms = [], []
    for i, j in ((0, 1), (0, 2), (1, 2)):
        residuals.append(derivatives[i, j] - derivatives[j, i])
        terms.extend((derivatives[i, j], derivatives[j, i]))
    return residual_report(
        name,
        residuals,
        spacing=grid.spacing,
        grid_summary=grid.summary(),
        terms=terms,
        collar=collar,
        mask=mask,
    )


def closedness_residual(omega: OneForm, collar: int | None = None) -> ResidualReport:
    """
    Sup/RMS of d_i g_j - d_j g_i over the three coordinate pairs, with order-2 differences.
    """
    return closedness_report("closedness", omega.values, omega.grid, collar)


def integrate_gradient(
    components, spacing: Sequence[float], base_node: Sequence[int], base_value=0.0
) -> np.ndarray:
    """
    Integrates a gradient system with the trapezoid rule along the lattice path: along
    axis 0 through the base node, then axis 1 from that line, then axis 2, and so on.

    Args:
        components: array (d, ..., n_1, ..., n_d), one gradient component per lattice axis;
            the middle axes are integrated independently.
        spacing: lattice spacings.
        base_node: lattice node where the result equals `base_value`.
        base_value: value (or array over the middle axes) at the base node.

    Returns:
        np.ndarray: the integrated field of shape (..., n_1, ..., n_d).
    """
    components = np.asarray(components, dtype=float)
    dims = len(spacing)
    if components.shape[0] != dims:
        raise GridError(f"Expected {dims} gradient components, got {components.shape[0]}")
    lattice_shape = components.shape[-dims:]
    if len(base_node) != dims or not all(0 <= int(i) < n for i, n in zip(base_node, lattice_shape)):
        raise GridError(f"Base node {tuple(base_node)} is outside the lattice {lattice_shape}")

    result = None
    for axis in range(dims):
        component = components[axis]
        offset = component.ndim - dims
        restrict = [slice(None)] * component.ndim
        for later in range(axis + 1, dims):
            restrict[offset + later] = slice(base_node[later], base_node[later] + 1)
        running = cumulative_trapezoid(
            component[tuple(restrict)], dx=spacing[axis], axis=offset + axis, initial=0.0
        )
        at_base = [slice(None)] * component.ndim
        at_base[offset + axis] = slice(base_node[axis], base_node[axis] + 1)
        running = running - running[tuple(at_base)]
        result = running if result is None else result + running

    base_value = np.asarray(base_value, dtype=float)
    return result + base_value.reshape(base_value.shape + (1,) * dims)


def integrate_oneform(
    omega: OneForm, base_node: Sequence[int] = (0, 0, 0), base_value: float = 0.0
) -> ScalarField:
    """
    Integrates a (closed) OneForm; the result takes `base_value` at `base_node`.
    """
    base_node = check_node(omega.grid, base_node)
    values = integrate_gradient(omega.values, omega.grid.spacing, base_node, base_value)
    return ScalarField(omega.grid, values)


def dump_csv(field: ScalarField, path: str) -> str:
    """
    Writes a ScalarField as CSV with header i,j,k,x,y,z,value and returns the path.
    """
    return write_scalar_csv(path, field.grid.mesh(), field.values)
