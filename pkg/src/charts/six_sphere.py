"""
6-sphere coordinates and their associated and dual systems.

The 6-sphere chart is the inversion of f = (x, y, sqrt(2) z):

    f = (x, y, sqrt(2) z) / D,   D = x^2 + y^2 + 2 z^2,   H = (1, 1, sqrt 2) / D.

It is a totally cyclic Guichard net. Its associated systems (1-systems) and dual systems
(Guichard nets) are Combescure transforms with closed-form multipliers; they share the
frame and rotational coefficients of the seed, their parametrizations are integrated.
"""

import numpy as np

from charts.chart_interface import GUICHARD, ONE_SYSTEM, AnalyticChart
from config import EPSILON

SQRT2 = np.sqrt(2.0)
WEIGHTS = np.array([1.0, 1.0, SQRT2])


def _coordinates(x, y, z):
    x, y, z = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in (x, y, z)))
    return x, y, z


def _expand(vector, ndim):
    return np.asarray(vector).reshape((-1,) + (1,) * ndim)


class SixSphereChart(AnalyticChart):
    """
    I = (dx^2 + dy^2 + 2 dz^2) / D^2; singular only at the origin.

    The normals N_i = (I - 2 v v^T / D) e_i with v = (x, y, sqrt(2) z) form a left-handed frame.
    """

    name = "six_sphere"
    classification = GUICHARD
    description = "6-sphere coordinates, inversion of (x, y, sqrt(2) z)"
    lower = (0.5, 0.5, 0.5)
    upper = (1.5, 1.5, 1.5)

    def position(self, x, y, z):
        x, y, z = _coordinates(x, y, z)
        denominator = x**2 + y**2 + 2.0 * z**2
        return np.stack((x, y, SQRT2 * z)) / denominator

    def lame(self, x, y, z):
        x, y, z = _coordinates(x, y, z)
        denominator = x**2 + y**2 + 2.0 * z**2
        return _expand(WEIGHTS, x.ndim) / denominator

    def lame_gradient(self, x, y, z):
        x, y, z = _coordinates(x, y, z)
        denominator = x**2 + y**2 + 2.0 * z**2
        d_denominator = np.stack((2.0 * x, 2.0 * y, 4.0 * z))
        return -d_denominator[:, None] * _expand(WEIGHTS, x.ndim)[None] / denominator**2

    def frame(self, x, y, z):
        x, y, z = _coordinates(x, y, z)
        denominator = x**2 + y**2 + 2.0 * z**2
        v = np.stack((x, y, SQRT2 * z))
        identity = np.eye(3).reshape((3, 3) + (1,) * x.ndim)
        return identity - 2.0 * v[:, None] * v[None] / denominator

    def associated_multipliers(self, x, y, z):
        x, y, z = _coordinates(x, y, z)
        return np.stack(
            (SQRT2 * (y**2 + z**2), -SQRT2 * (x**2 + z**2), (y**2 - x**2) / SQRT2)
        )

    def associated_multiplier_gradient(self, x, y, z) -> np.ndarray:
        """
        Returns [i, j] = d_i h_j for the associated multipliers at c = 0.
        """
        x, y, z = _coordinates(x, y, z)
        zero = np.zeros_like(x)
        return np.stack(
            (
                np.stack((zero, -2.0 * SQRT2 * x, -SQRT2 * x)),
                np.stack((2.0 * SQRT2 * y, zero, SQRT2 * y)),
                np.stack((2.0 * SQRT2 * z, -2.0 * SQRT2 * z, zero)),
            )
        )


class SixSphereCombescureChart(AnalyticChart):
    """
    Combescure transform of the 6-sphere chart with multipliers h_i: H_i = h_i H_i(seed),
    same frame and rotational coefficients.
    """

    lower = SixSphereChart.lower
    upper = SixSphereChart.upper
    parameter_names = ("c",)

    def __init__(self, params: dict = None):
        super().__init__(params)
        self.seed = SixSphereChart()

    def multipliers(self, x, y, z) -> tuple[np.ndarray, np.ndarray]:
        """
        Returns the multipliers h (3, *S) and their gradient [i, j] = d_i h_j.
        """
        raise NotImplementedError("Subclasses must implement this method")

    def lame(self, x, y, z):
        h, _ = self.multipliers(x, y, z)
        return h * self.seed.lame(x, y, z)

    def lame_gradient(self, x, y, z):
        h, dh = self.multipliers(x, y, z)
        return dh * self.seed.lame(x, y, z)[None] + h[None] * self.seed.lame_gradient(x, y, z)

    def frame(self, x, y, z):
        return self.seed.frame(x, y, z)

    def rotational(self, x, y, z):
        return self.seed.rotational(x, y, z)


class SixSphereAssociatedChart(SixSphereCombescureChart):
    """
    Associated 1-systems: H_1 = (c + sqrt2 (y^2 + z^2)) / D, H_2 = (c - sqrt2 (x^2 + z^2)) / D,
    H_3 = (sqrt2 c - x^2 + y^2) / D.
    """

    name = "six_sphere_associated"
    classification = ONE_SYSTEM
    description = "associated systems of the 6-sphere coordinates, h_i + c"

    def multipliers(self, x, y, z):
        h = self.seed.associated_multipliers(x, y, z) + self.params["c"]
        return h, self.seed.associated_multiplier_gradient(x, y, z)


class SixSphereDualChart(SixSphereCombescureChart):
    """
    Dual Guichard nets with multipliers h*_i = -(h_i + c)^2 + eps_i / H_i^2.
    """

    name = "six_sphere_dual"
    classification = GUICHARD
    description = "dual systems of the 6-sphere coordinates, -(h_i + c)^2 + eps_i / H_i^2"

    def multipliers(self, x, y, z):
        h = self.seed.associated_multipliers(x, y, z) + self.params["c"]
        dh = self.seed.associated_multiplier_gradient(x, y, z)
        lame = self.seed.lame(x, y, z)
        d_lame = self.seed.lame_gradient(x, y, z)
        epsilon = _expand(EPSILON, lame.ndim - 1)
        star = -(h**2) + epsilon / lame**2
        d_star = -2.0 * h[None] * dh - 2.0 * epsilon[None] * d_lame / lame[None] ** 3
        return star, d_star


def six_sphere_dual_h3_unhalved(x, y, z, c: float = 0.0):
    """
    Variant of the third dual Lame coefficient whose leading term is -sqrt2 D^2 instead of
    -sqrt2 D^2 / 2. It does not satisfy the Guichard trace; kept as a regression control.
    """
    x, y, z = _coordinates(x, y, z)
    denominator = x**2 + y**2 + 2.0 * z**2
    return (-SQRT2 * denominator**2 - SQRT2 * (c + (y**2 - x**2) / SQRT2) ** 2) / denominator


__all__ = [
    "SixSphereChart",
    "SixSphereAssociatedChart",
    "SixSphereDualChart",
    "six_sphere_dual_h3_unhalved",
]
