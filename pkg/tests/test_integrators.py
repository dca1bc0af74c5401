import numpy as np
import pytest

from exceptions.error import GridError
from grid import GridSpec
from integrators import (
    REVERSED_ORDER,
    march_lattice,
    midpoint_generators,
    nearest_orthonormal,
    orthonormality_defect,
)


def _scalar_generators(grid, rates):
    shape = (3, 1, 1) + grid.shape
    generators = np.zeros(shape)
    for axis, rate in enumerate(rates):
        generators[axis] = rate
    return generators


def test_midpoint_generators_are_exact_on_cubics():
    """
    The interior cubic rule and the quadratic end rules reproduce polynomial samples.
    """
    x = np.linspace(0.0, 1.0, 9)
    mids = midpoint_generators(x**2)
    np.testing.assert_allclose(mids, (0.5 * (x[:-1] + x[1:])) ** 2, atol=1e-12)
    with pytest.raises(GridError):
        midpoint_generators(np.zeros(1))


def test_march_lattice_solves_exponential_growth():
    """
    dU/dx = U, dU/dy = 2U, dU/dz = -U gives U = exp(x + 2y - z) from the base node.
    """
    grid = GridSpec.cube(-0.5, 0.5, 11)
    X, Y, Z = grid.mesh()
    result = march_lattice(_scalar_generators(grid, (1.0, 2.0, -1.0)), [1.0], grid.spacing, (5, 5, 5))
    assert result.values.shape == (1, 1) + grid.shape
    np.testing.assert_allclose(result.values[0, 0], np.exp(X + 2 * Y - Z), rtol=1e-4)
    assert result.max_drift == 0.0

    reversed_result = march_lattice(
        _scalar_generators(grid, (1.0, 2.0, -1.0)), [1.0], grid.spacing, (5, 5, 5), REVERSED_ORDER
    )
    np.testing.assert_allclose(reversed_result.values, result.values, rtol=1e-4)


def test_march_lattice_keeps_projected_frames_orthonormal():
    """
    A rotation generator about the third axis turns the frame by the angle z.
    """
    grid = GridSpec.cube(0.0, 1.0, 9)
    generators = np.zeros((3, 3, 3) + grid.shape)
    generators[2, 0, 1] = 1.0
    generators[2, 1, 0] = -1.0
    result = march_lattice(generators, np.eye(3), grid.spacing, (0, 0, 0), project=True)
    frames = np.moveaxis(result.values, (0, 1), (-2, -1))
    assert orthonormality_defect(frames).max() < 1e-12
    angle = grid.axis_values(3)[-1]
    np.testing.assert_allclose(frames[0, 0, -1, 0], [np.cos(angle), np.sin(angle), 0.0], atol=1e-5)
    assert result.max_drift < 1e-5


def test_march_lattice_validates_inputs():
    grid = GridSpec.cube(0.0, 1.0, 5)
    with pytest.raises(GridError):
        march_lattice(np.zeros((3, 2, 2) + grid.shape), [1.0], grid.spacing, (0, 0, 0))
    with pytest.raises(GridError):
        march_lattice(_scalar_generators(grid, (1, 1, 1)), [1.0], grid.spacing, (0, 0, 0), (0, 0, 1))


def test_nearest_orthonormal_projects_scaled_rotation():
    rotation = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    np.testing.assert_allclose(nearest_orthonormal(1.01 * rotation), rotation, atol=1e-12)
