"""
Spherical coordinates (r, theta, phi): an orthogonal system that is not a Guichard net.
"""

import numpy as np

from charts.chart_interface import CONTROL, AnalyticChart


class SphericalControlChart(AnalyticChart):
    """
    f = (r sin(theta) cos(phi), r sin(theta) sin(phi), r cos(theta)), H = (1, r, r sin(theta)),
    trace 1 + r^2 cos^2(theta). The box stays away from the axis theta = 0.
    """

    name = "spherical_control"
    classification = CONTROL
    description = "spherical coordinates (r, theta, phi), negative control"
    lower = (1.0, np.pi / 4.0, 0.0)
    upper = (2.0, 3.0 * np.pi / 4.0, np.pi / 2.0)

    def position(self, x, y, z):
        r, theta, phi = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in (x, y, z)))
        return np.stack(
            (r * np.sin(theta) * np.cos(phi), r * np.sin(theta) * np.sin(phi), r * np.cos(theta))
        )

    def lame(self, x, y, z):
        r, theta, _ = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in (x, y, z)))
        return np.stack((np.ones_like(r), r, r * np.sin(theta)))

    def lame_gradient(self, x, y, z):
        r, theta, _ = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in (x, y, z)))
        zero, one = np.zeros_like(r), np.ones_like(r)
        return np.stack(
            (
                np.stack((zero, one, np.sin(theta))),
                np.stack((zero, zero, r * np.cos(theta))),
                np.stack((zero, zero, zero)),
            )
        )

    def frame(self, x, y, z):
        _, theta, phi = np.broadcast_arrays(*(np.asarray(c, dtype=float) for c in (x, y, z)))
        return np.stack(
            (
                np.stack((np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta))),
                np.stack((np.cos(theta) * np.cos(phi), np.cos(theta) * np.sin(phi), -np.sin(theta))),
                np.stack((-np.sin(phi), np.cos(phi), np.zeros_like(phi))),
            )
        )
