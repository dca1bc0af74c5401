"""
Combescure transformations of triply orthogonal systems.

A triple of multipliers (h_1, h_2, h_3) defines a Combescure transform of a system f by
df^ = h_1 d_x f dx + h_2 d_y f dy + h_3 d_z f dz, which is integrable iff

    d_i h_j = (h_i - h_j) d_i ln H_j,   i != j.

The transform keeps the normals and the rotational coefficients and rescales H_i by h_i.

Functions:
    check_combescure: residual of the compatibility conditions.
    apply_combescure: integrates f^ and assembles the transformed system.
    phi_triple_to_combescure: multipliers induced by a triple (phi_1, phi_2, phi_3).
    invert_triple: the multipliers 1/h_i of the inverse transform.
    multipliers_between: h_i = H^_i / H_i for two Combescure related systems.
    check_shared_beta: compares the rotational coefficients of two systems.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from exceptions.error import IntegrabilityError, PreconditionError
from grid import check_node, closedness_report, integrate_gradient, lattice_gradient
from logger import get_logger
from residuals import ResidualReport, exceeds_gate, nonvanishing, residual_report
from tos_core import CYCLIC, OrthogonalSystem, require_nonvanishing

logger = get_logger(__name__)


@dataclass(frozen=True)
class CombescureTriple:
    """
    Multipliers h (3, n1, n2, n3) relating `base` to a Combescure transform. `gradient`
    optionally holds exact derivatives gradient[i, j] = d_i h_j. Vanishing h_i are allowed
    and produce degenerate transforms.
    """

    h: np.ndarray
    base: OrthogonalSystem
    gradient: np.ndarray | None = None

    @classmethod
    def constant(cls, system: OrthogonalSystem, value: float) -> CombescureTriple:
        """
        The scaling triple (value, value, value), giving f^ = value * f.
        """
        return cls(
            np.full(system.H.shape, float(value)),
            system,
            np.zeros((3,) + system.H.shape),
        )

    def shifted(self, c: float) -> CombescureTriple:
        """
        Returns the triple h_i + c.
        """
        return CombescureTriple(self.h + c, self.base, self.gradient)

    def derivatives(self, order: int | None = None) -> np.ndarray:
        if self.gradient is not None:
            return self.gradient
        return lattice_gradient(self.h, self.base.grid.spacing, order)


@dataclass(frozen=True)
class PhiTriple:
    """
    phi (3, n1, n2, n3) with phi_1 + phi_2 + phi_3 = 0, inducing multipliers with
    h_i - h_j = phi_k for cyclic (i, j, k).
    """

    phi: np.ndarray
    gradient: np.ndarray | None = None

    def derivatives(self, spacing: Sequence[float], order: int | None = None) -> np.ndarray:
        if self.gradient is not None:
            return self.gradient
        return lattice_gradient(self.phi, spacing, order)


def _report(name, residuals, system: OrthogonalSystem, **kwargs) -> ResidualReport:
    grid = system.grid
    return residual_report(name, residuals, spacing=grid.spacing, grid_summary=grid.summary(), **kwargs)


def check_combescure(
    system: OrthogonalSystem, triple: CombescureTriple, order: int | None = None
) -> ResidualReport:
    """
    Residual of d_i h_j - (h_i - h_j) d_i ln H_j over the six pairs i != j; equivalently
    the defect of beta^_ij = beta_ij. Nodes with vanishing H are masked.
    """
    h = triple.h
    dh = triple.derivatives(order)
    dH = system.lame_gradient(order)
    mask = nonvanishing(system.H)
    safe = np.where(mask, system.H, 1.0)
    residuals, terms = [], []
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            rhs = (h[i] - h[j]) * dH[i, j] / safe[j]
            residuals.append(dh[i, j] - rhs)
            terms.extend((dh[i, j], rhs))
    return _report("combescure", residuals, system, terms=terms, mask=mask)


def apply_combescure(
    system: OrthogonalSystem,
    triple: CombescureTriple,
    base_node: Sequence[int] = (0, 0, 0),
    base_point: Sequence[float] = (0.0, 0.0, 0.0),
) -> OrthogonalSystem:
    """
    Integrates df^ = sum_i h_i H_i N_i dx_i and returns the transformed system with
    H^_i = h_i H_i, N^_i = N_i and beta^_ij = beta_ij.

    Args:
        system (OrthogonalSystem): the system to transform.
        triple (CombescureTriple): multipliers on the system's grid.
        base_node: node where f^ equals `base_point`.
        base_point: anchor of f^.

    Returns:
        OrthogonalSystem: the transform, flagged degenerate where some h_i vanishes.

    Raises:
        IntegrabilityError: if the integrand is not closed beyond the gate tolerance.
    """
    base_node = check_node(system.grid, base_node)
    h = triple.h
    integrand = (h * system.H)[:, None] * system.N
    closedness = closedness_report("combescure.closedness", integrand, system.grid)
    if exceeds_gate(closedness):
        raise IntegrabilityError(
            f"Combescure integrand is not closed (sup {closedness.sup:.3e}, tolerance {closedness.tolerance:.3e})",
            report=closedness,
        )
    compatibility = check_combescure(system, triple)
    f_hat = integrate_gradient(integrand, system.grid.spacing, base_node, np.asarray(base_point, dtype=float))

    dH = None
    if system.dH is not None:
        dH = triple.derivatives() * system.H[None] + h[None] * system.dH
    degenerate = system.degenerate or not bool(nonvanishing(h).all())
    if degenerate:
        logger.warning("Combescure transform has vanishing multipliers, output flagged degenerate")

    transformed = OrthogonalSystem(
        grid=system.grid,
        f=f_hat,
        H=h * system.H,
        N=system.N,
        beta=system.beta,
        dH=dH,
        provenance={
            "transform": "combescure",
            "parent": system.provenance,
            "base_node": list(base_node),
            "base_point": [float(v) for v in base_point],
        },
        degenerate=degenerate,
    )
    return transformed.with_diagnostics([closedness, compatibility])


def check_phi_triple(
    system: OrthogonalSystem, phis: PhiTriple, order: int | None = None
) -> tuple[ResidualReport, ResidualReport]:
    """
    Checks phi_1 + phi_2 + phi_3 = 0 and d_j phi_j = phi_i d_j ln H_k + phi_k d_j ln H_i.
    """
    phi = phis.phi
    total = _report("phi_triple.sum", [phi.sum(axis=0)], system, terms=[phi])

    dphi = phis.derivatives(system.grid.spacing, order)
    dH = system.lame_gradient(order)
    mask = nonvanishing(system.H)
    safe = np.where(mask, system.H, 1.0)
    residuals, terms = [], []
    for i, j, k in CYCLIC:
        first = phi[i] * dH[j, k] / safe[k]
        second = phi[k] * dH[j, i] / safe[i]
        residuals.append(dphi[j, j] - first - second)
        terms.extend((dphi[j, j], first, second))
    derivative = _report("phi_triple.derivative", residuals, system, terms=terms, mask=mask)
    return total, derivative


def phi_triple_to_combescure(
    system: OrthogonalSystem,
    phis: PhiTriple,
    c: float = 0.0,
    base_node: Sequence[int] = (0, 0, 0),
    order: int | None = None,
) -> CombescureTriple:
    """
    Integrates the multipliers induced by a phi triple. For cyclic (i, j, k):

        d_j h_j = phi_i d_j ln H_k + d_j phi_i,
        d_k h_j = -phi_i d_k ln H_j,
        d_i h_j = phi_k d_i ln H_j.

    The additive constant is fixed by h_3 = c at `base_node`, so that h_1 = c - phi_2 and
    h_2 = c + phi_1 there.

    Raises:
        PreconditionError: if the phi triple invariants fail beyond the gate tolerance.
        IntegrabilityError: if a gradient system is not closed.
    """
    base_node = check_node(system.grid, base_node)
    failures = [report.name for report in check_phi_triple(system, phis, order) if exceeds_gate(report)]
    if failures:
        raise PreconditionError("phi triple invariants violated", failures=failures)

    phi = phis.phi
    dphi = phis.derivatives(system.grid.spacing, order)
    dH = system.lame_gradient(order)
    require_nonvanishing(system.H, "Lame coefficient")
    H = system.H

    gradient = np.empty((3, 3) + H.shape[1:])
    for i, j, k in CYCLIC:
        gradient[j, j] = phi[i] * dH[j, k] / H[k] + dphi[j, i]
        gradient[k, j] = -phi[i] * dH[k, j] / H[j]
        gradient[i, j] = phi[k] * dH[i, j] / H[j]

    anchors = np.array([c - phi[1][base_node], c + phi[0][base_node], c])
    closedness = closedness_report("phi_triple.closedness", gradient, system.grid)
    if exceeds_gate(closedness):
        raise IntegrabilityError("Gradient system of the phi triple is not closed", report=closedness)
    h = integrate_gradient(gradient, system.grid.spacing, base_node, anchors)
    logger.info("Integrated Combescure multipliers from phi triple (c=%s)", c)
    return CombescureTriple(h, system, gradient)


def invert_triple(triple: CombescureTriple, new_system: OrthogonalSystem) -> CombescureTriple:
    """
    Returns the multipliers 1/h_i taking the transform `new_system` back to the base system.
    """
    require_nonvanishing(triple.h, "Combescure multiplier")
    gradient = None if triple.gradient is None else -triple.gradient / triple.h[None] ** 2
    return CombescureTriple(1.0 / triple.h, new_system, gradient)


def multipliers_between(system: OrthogonalSystem, comb_system: OrthogonalSystem) -> CombescureTriple:
    """
    Recovers the multipliers h_i = H^_i / H_i of a Combescure transform.
    """
    require_nonvanishing(system.H, "Lame coefficient")
    h = comb_system.H / system.H
    gradient = None
    if system.dH is not None and comb_system.dH is not None:
        gradient = (comb_system.dH - h[None] * system.dH) / system.H[None]
    return CombescureTriple(h, system, gradient)


def check_shared_beta(
    system: OrthogonalSystem, other: OrthogonalSystem, name: str = "shared_beta"
) -> ResidualReport:
    """
    Compares the rotational coefficients of two systems on one grid.
    """
    return _report(name, [system.beta - other.beta], system, terms=[system.beta, other.beta])
