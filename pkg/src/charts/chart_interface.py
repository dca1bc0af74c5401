"""
Analytic chart interface defining the closed-form evaluators of a reference system.
"""

from abc import ABC, abstractmethod

import numpy as np

GUICHARD = "guichard"
ONE_SYSTEM = "1-system"
CONTROL = "control"


def broadcast_stack(components, shape: tuple) -> np.ndarray:
    """
    Stacks components (arrays or constants) along a new leading axis, broadcasting each to `shape`.
    """
    return np.stack([np.broadcast_to(np.asarray(c, dtype=float), shape) for c in components]).copy()


class AnalyticChart(ABC):
    """
    Interface for closed-form reference charts.

    Evaluators take coordinate arrays x, y, z of one common shape S and return
    - lame: (3, *S), signed Lame coefficients,
    - lame_gradient: (3, 3, *S) with [i, j] = d_i H_j,
    - frame: (3, 3, *S) with [i] = N_i,
    - position: (3, *S), or None when the chart has no closed-form parametrization.
    """

    name: str = None
    classification: str = None
    description: str = None
    lower: tuple = None
    upper: tuple = None
    parameter_names: tuple = ()

    def __init__(self, params: dict = None):
        """
        Initialize the chart with its parameters.

        Args:
            params: Dictionary of chart parameters (see parameter_names).
        """
        self.params = {name: 0.0 for name in self.parameter_names}
        self.params.update(params or {})

    @abstractmethod
    def lame(self, x, y, z) -> np.ndarray:
        """
        Evaluates the Lame coefficients H_1, H_2, H_3.
        """
        raise NotImplementedError("Subclasses must implement this method")

    @abstractmethod
    def lame_gradient(self, x, y, z) -> np.ndarray:
        """
        Evaluates the exact derivatives d_i H_j.
        """
        raise NotImplementedError("Subclasses must implement this method")

    @abstractmethod
    def frame(self, x, y, z) -> np.ndarray:
        """
        Evaluates the unit normals N_1, N_2, N_3.
        """
        raise NotImplementedError("Subclasses must implement this method")

    def position(self, x, y, z) -> np.ndarray | None:
        """
        Evaluates the parametrization f, if known in closed form.
        """
        return None

    def associated_multipliers(self, x, y, z) -> np.ndarray | None:
        """
        Evaluates the closed-form multipliers (h_1, h_2, h_3) of the associated family at c = 0,
        if the chart is a Guichard net that provides them.
        """
        return None

    def rotational(self, x, y, z) -> np.ndarray:
        """
        Evaluates beta_ij = (1/H_i) d_i H_j with a zero diagonal.
        """
        beta = self.lame_gradient(x, y, z) / self.lame(x, y, z)[:, None]
        for i in range(3):
            beta[i, i] = 0.0
        return beta

    def describe(self) -> dict:
        """
        Returns the registry metadata of the chart.
        """
        return {
            "name": self.name,
            "classification": self.classification,
            "description": self.description,
            "params": dict(self.params),
            "box": {"lower": list(self.lower), "upper": list(self.upper)},
            "closed_form_position": self.position(1.0, 1.0, 1.0) is not None,
        }
