"""
Cartesian coordinates f = (x, y, sqrt(2) z), the simplest Guichard net.
"""

import numpy as np

from charts.chart_interface import GUICHARD, AnalyticChart, broadcast_stack

SQRT2 = np.sqrt(2.0)


class FlatGuichardChart(AnalyticChart):
    """
    H = (1, 1, sqrt 2): H_1^2 + H_2^2 - H_3^2 = 0 with a constant frame.
    """

    name = "flat_guichard"
    classification = GUICHARD
    description = "Cartesian coordinates f = (x, y, sqrt(2) z)"
    lower = (-1.0, -1.0, -1.0)
    upper = (1.0, 1.0, 1.0)

    def position(self, x, y, z):
        x = np.asarray(x, dtype=float)
        return broadcast_stack((x, y, SQRT2 * np.asarray(z, dtype=float)), np.broadcast(x, y, z).shape)

    def lame(self, x, y, z):
        return broadcast_stack((1.0, 1.0, SQRT2), np.broadcast(x, y, z).shape)

    def lame_gradient(self, x, y, z):
        return np.zeros((3, 3) + np.broadcast(x, y, z).shape)

    def frame(self, x, y, z):
        shape = np.broadcast(x, y, z).shape
        return np.broadcast_to(np.eye(3).reshape((3, 3) + (1,) * len(shape)), (3, 3) + shape).copy()

    def associated_multipliers(self, x, y, z):
        return broadcast_stack((1.0 / SQRT2, -1.0 / SQRT2, 0.0), np.broadcast(x, y, z).shape)
