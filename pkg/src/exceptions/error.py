"""
This module defines custom exception classes for the orthonet package.
"""


class OrthonetError(Exception):
    """
    Base class of all errors raised by the orthonet package.
    """

    def __init__(self, message="Orthonet error"):
        self.message = message
        super().__init__(self.message)


class GridError(OrthonetError):
    """
    Exception raised for invalid grids, axes, stencil sizes or nodes.
    """

    def __init__(self, message="Invalid grid"):
        super().__init__(message)


class DegenerateSystemError(OrthonetError):
    """
    Exception raised when a required quantity vanishes (Jacobian, Lame coefficient,
    |f|^2, A or |fbar|^2) at a node where a division is needed.
    """

    def __init__(self, message="Degenerate system", node=None):
        self.node = node
        if node is not None:
            message = f"{message} (node {tuple(int(i) for i in node)})"
        super().__init__(message)


class IntegrabilityError(OrthonetError):
    """
    Exception raised when an integrand is not closed or a lattice integration is path dependent.
    """

    def __init__(self, message="Integrability condition violated", report=None):
        self.report = report
        super().__init__(message)


class PreconditionError(OrthonetError):
    """
    Exception raised when the input of an operation violates its precondition.
    """

    def __init__(self, message="Precondition violated", failures=None):
        self.failures = list(failures or [])
        super().__init__(message)


class ChartNotFoundError(OrthonetError):
    """
    Exception raised for unknown catalog charts.
    """

    def __init__(self, message="Chart not found"):
        super().__init__(message)


class DomainError(OrthonetError):
    """
    Exception raised when chart parameters or a grid leave the chart's validity domain.
    """

    def __init__(self, message="Outside of the chart domain"):
        super().__init__(message)


class ConfigError(OrthonetError):
    """
    Exception raised for invalid run configurations.
    """

    def __init__(self, message="Invalid run configuration"):
        super().__init__(message)
