"""
Lattice line-marching for linear first-order systems dU/dx_a = M_a(x) U.

The state U is an (m, p) matrix per node (p = 1 for vector states, p = m for frames stored
row-wise). The system is marched with the classical 4th-order Runge-Kutta step along lattice
lines: first along one axis through the base node, then across the plane spanned with a
second axis, then through the volume along the third. Coefficients at half steps come from
cubic interpolation of the sampled generators (quadratic at the two ends of a line).

Frame states can be projected back onto the orthogonal group after every step
(nearest orthonormal matrix via SVD); the defect before projection is recorded as drift.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from exceptions.error import GridError

DEFAULT_ORDER = (0, 1, 2)
REVERSED_ORDER = (2, 1, 0)


@dataclass(frozen=True)
class MarchResult:
    """
    Marched states of shape (m, p, n1, n2, n3) and the per-node orthonormality drift
    (zero unless projection is enabled).
    """

    values: np.ndarray
    drift: np.ndarray
    order: tuple[int, int, int]

    @property
    def max_drift(self) -> float:
        return float(self.drift.max()) if self.drift.size else 0.0


def midpoint_generators(generators: np.ndarray) -> np.ndarray:
    """
    Interpolates generators sampled at n line nodes to the n - 1 interval midpoints.

    Interior intervals use the 4-point cubic rule (-M[k-1] + 9M[k] + 9M[k+1] - M[k+2]) / 16,
    the first and last intervals the 3-point quadratic rules.
    """
    count = generators.shape[0]
    if count < 2:
        raise GridError("A line needs at least two nodes to be marched")
    if count < 4:
        return 0.5 * (generators[:-1] + generators[1:])
    mids = np.empty((count - 1,) + generators.shape[1:])
    mids[1:-1] = (
        -generators[:-3] + 9.0 * generators[1:-2] + 9.0 * generators[2:-1] - generators[3:]
    ) / 16.0
    mids[0] = (3.0 * generators[0] + 6.0 * generators[1] - generators[2]) / 8.0
    mids[-1] = (-generators[-3] + 6.0 * generators[-2] + 3.0 * generators[-1]) / 8.0
    return mids


def nearest_orthonormal(states: np.ndarray) -> np.ndarray:
    """
    Projects a batch of square matrices (..., m, m) onto the nearest orthonormal matrices.
    """
    u, _, vt = np.linalg.svd(states)
    return u @ vt


def orthonormality_defect(states: np.ndarray) -> np.ndarray:
    """
    Returns max |U U^T - I| per matrix of a batch (..., m, m).
    """
    identity = np.eye(states.shape[-1])
    gram = states @ np.swapaxes(states, -1, -2)
    return np.abs(gram - identity).max(axis=(-2, -1))


def _rk4_step(state, start, middle, end, step):
    k1 = start @ state
    k2 = middle @ (state + 0.5 * step * k1)
    k3 = middle @ (state + 0.5 * step * k2)
    k4 = end @ (state + step * k3)
    return state + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def march_lines(
    generators: np.ndarray,
    initial: np.ndarray,
    spacing: float,
    start: int,
    project: bool = False,
    initial_drift: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Marches a batch of parallel lines forward and backward from a common start index.

    Args:
        generators: (n, B, m, m) generators sampled along the lines.
        initial: (B, m, p) states at the start index.
        spacing (float): node spacing along the lines.
        start (int): index where the initial states sit.
        project (bool): project square states onto the orthogonal group after each step.
        initial_drift: (B,) drift already accumulated at the start nodes.

    Returns:
        tuple: states (n, B, m, p) and drift (n, B).
    """
    count = generators.shape[0]
    mids = midpoint_generators(generators)
    states = np.empty((count,) + initial.shape)
    drift = np.zeros((count, initial.shape[0]))
    states[start] = initial
    if initial_drift is not None:
        drift[start] = initial_drift

    def advance(state, k_from, k_to, middle):
        new = _rk4_step(state, generators[k_from], middle, generators[k_to], spacing * (k_to - k_from))
        if not project:
            return new, np.zeros(new.shape[0])
        defect = orthonormality_defect(new)
        return nearest_orthonormal(new), defect

    for k in range(start, count - 1):
        states[k + 1], defect = advance(states[k], k, k + 1, mids[k])
        drift[k + 1] = np.maximum(drift[k], defect)
    for k in range(start, 0, -1):
        states[k - 1], defect = advance(states[k], k, k - 1, mids[k - 1])
        drift[k - 1] = np.maximum(drift[k], defect)
    return states, drift


def march_lattice(
    generators: np.ndarray,
    initial,
    spacing: Sequence[float],
    base_node: Sequence[int],
    order: Sequence[int] = DEFAULT_ORDER,
    project: bool = False,
) -> MarchResult:
    """
    Integrates dU/dx_a = M_a U over a 3-D lattice from U(base_node) = initial.

    Args:
        generators: (3, m, m, n1, n2, n3), the generator M_a of every axis a at every node.
        initial: (m,) or (m, p) state at the base node.
        spacing: lattice spacings.
        base_node: lattice index of the initial state.
        order: axes in marching order, e.g. (0, 1, 2) marches x-lines, then y, then z.
        project (bool): re-orthonormalize square states after every step.

    Returns:
        MarchResult: states (m, p, n1, n2, n3), or (m, 1, ...) for vector states.
    """
    generators = np.asarray(generators, dtype=float)
    initial = np.asarray(initial, dtype=float)
    if initial.ndim == 1:
        initial = initial[:, None]
    size = initial.shape[0]
    lattice_shape = generators.shape[3:]
    if generators.shape[:3] != (3, size, size) or len(lattice_shape) != 3:
        raise GridError(f"Generators of shape {generators.shape} do not match a state of size {size}")
    if sorted(order) != [0, 1, 2]:
        raise GridError(f"Marching order must be a permutation of (0, 1, 2), got {tuple(order)}")
    if project and initial.shape[0] != initial.shape[1]:
        raise GridError("Projection requires square states")
    a, b, c = order
    base = tuple(int(i) for i in base_node)
    na, nb, nc = lattice_shape[a], lattice_shape[b], lattice_shape[c]

    def along(axis):
        # generator of `axis` with lattice axes in marching order, state axes last
        return np.transpose(generators[axis], (2 + a, 2 + b, 2 + c, 0, 1))

    line, line_drift = march_lines(
        along(a)[:, base[b], base[c]][:, None], initial[None], spacing[a], base[a], project
    )
    line, line_drift = line[:, 0], line_drift[:, 0]

    plane, plane_drift = march_lines(
        np.swapaxes(along(b)[:, :, base[c]], 0, 1), line, spacing[b], base[b], project, line_drift
    )
    plane, plane_drift = np.swapaxes(plane, 0, 1), np.swapaxes(plane_drift, 0, 1)

    volume_generators = np.moveaxis(along(c), 2, 0).reshape((nc, na * nb, size, size))
    volume, volume_drift = march_lines(
        volume_generators,
        plane.reshape((na * nb,) + initial.shape),
        spacing[c],
        base[c],
        project,
        plane_drift.reshape(na * nb),
    )
    volume = np.moveaxis(volume.reshape((nc, na, nb) + initial.shape), 0, 2)
    volume_drift = np.moveaxis(volume_drift.reshape(nc, na, nb), 0, 2)

    values = np.moveaxis(volume, [0, 1, 2, 3, 4], [2 + a, 2 + b, 2 + c, 0, 1])
    drift = np.moveaxis(volume_drift, [0, 1, 2], [a, b, c])
    return MarchResult(values=values, drift=drift, order=(a, b, c))
