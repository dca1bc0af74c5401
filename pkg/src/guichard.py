"""
Guichard nets as G-systems.

A Guichard net satisfies H_1^2 + H_2^2 - H_3^2 = 0. Its associated systems are the
Combescure transforms with multipliers h_i + c, where

    d_x h_3 = H_2 beta_13 / H_3^2,  d_y h_3 = -H_1 beta_23 / H_3^2,
    d_z h_3 = (H_2 beta_31 - H_1 beta_32) / H_3^2,
    h_1 = h_3 + H_2 / (H_1 H_3),  h_2 = h_3 - H_1 / (H_2 H_3),

and they are 1-systems. The dual systems h*_i = -(h_i + c)^2 + eps_i / H_i^2 are again
Guichard nets, and the three systems satisfy H_i H*_j + H_j H*_i = -2 H^_i H^_j (i != j).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

import catalog
from combescure import CombescureTriple, apply_combescure, check_combescure, check_shared_beta
from config import EPSILON
from exceptions.error import IntegrabilityError, PreconditionError
from grid import check_node, closedness_report, integrate_gradient
from logger import get_logger
from residuals import ResidualReport, exceeds_gate, residual_report
from tos_core import CYCLIC, PAIRS, OrthogonalSystem, require_nonvanishing

logger = get_logger(__name__)

_EPS = np.asarray(EPSILON)
_EPS_FIELD = _EPS.reshape((3, 1, 1, 1))


def _report(name, residuals, system: OrthogonalSystem, **kwargs) -> ResidualReport:
    grid = system.grid
    return residual_report(name, residuals, spacing=grid.spacing, grid_summary=grid.summary(), **kwargs)


@dataclass(frozen=True)
class AssociatedFamily:
    """
    The associated family of a Guichard net: the c = 0 multipliers, the seed, the c = 0
    system and the anchoring used for every member.
    """

    triple: CombescureTriple
    seed: OrthogonalSystem
    system_zero: OrthogonalSystem
    anchor: dict
    diagnostics: dict = field(default_factory=dict)

    @property
    def base_node(self) -> tuple[int, int, int]:
        return tuple(self.anchor["base_node"])

    def triple_at(self, c: float) -> CombescureTriple:
        return self.triple.shifted(c)

    def describe(self) -> dict:
        return {"seed": self.seed.provenance, "anchor": self.anchor}


@dataclass(frozen=True)
class DualFamily:
    """
    Star multipliers h*_i,c = -(h_i + c)^2 + eps_i / H_i^2 for the requested parameters.
    """

    seed: OrthogonalSystem
    family: AssociatedFamily
    triples: dict

    @classmethod
    def of(cls, family: AssociatedFamily, parameters: Sequence[float]) -> DualFamily:
        return cls(family.seed, family, {float(c): dual_triple(family, c) for c in parameters})

    def triple(self, c: float) -> CombescureTriple:
        c = float(c)
        if c not in self.triples:
            return dual_triple(self.family, c)
        return self.triples[c]


def check_guichard(system: OrthogonalSystem, order: int | None = None) -> tuple[ResidualReport, ResidualReport]:
    """
    Checks the Guichard condition eps_1 H_1^2 + eps_2 H_2^2 + eps_3 H_3^2 = 0 and its
    differentiated form eps_i d_i H_i + eps_j H_j beta_ij + eps_k H_k beta_ik = 0.

    Returns:
        tuple: (algebraic, differentiated) ResidualReports.
    """
    H, beta = system.H, system.beta
    squares = _EPS_FIELD * H**2
    algebraic = _report("guichard.trace", [squares.sum(axis=0)], system, terms=[H**2], pointwise=True)

    dH = system.lame_gradient(order)
    residuals, terms = [], []
    for i in range(3):
        pieces = [_EPS[i] * dH[i, i]] + [_EPS[m] * H[m] * beta[i, m] for m in range(3) if m != i]
        residuals.append(sum(pieces))
        terms.extend(pieces)
    differentiated = _report("guichard.differentiated", residuals, system, terms=terms)
    return algebraic, differentiated


def associated_h3_gradient(system: OrthogonalSystem) -> np.ndarray:
    """
    Returns the gradient system of h_3 (rows d_x, d_y, d_z).
    """
    H, beta = system.H, system.beta
    require_nonvanishing(H[2], "Lame coefficient H_3")
    squared = H[2] ** 2
    return np.stack(
        (
            H[1] * beta[0, 2] / squared,
            -H[0] * beta[1, 2] / squared,
            (H[1] * beta[2, 0] - H[0] * beta[2, 1]) / squared,
        )
    )


def check_h3_closedness(system: OrthogonalSystem) -> ResidualReport:
    """
    Closedness of the h_3 gradient system; O(h^2) on Guichard nets, O(1) otherwise.
    """
    return closedness_report("associated.h3_closedness", associated_h3_gradient(system), system.grid)


def _quotient_gradient(quotient, dH, H, numerator: int, denominators: tuple[int, int]) -> np.ndarray:
    # d(H_n / (H_a H_b)) = q (d ln H_n - d ln H_a - d ln H_b)
    a, b = denominators
    return quotient[None] * (dH[:, numerator] / H[numerator] - dH[:, a] / H[a] - dH[:, b] / H[b])


def _default_h3_base(system: OrthogonalSystem, base_node) -> float:
    chart = catalog.chart_of(system)
    if chart is None:
        return 0.0
    multipliers = chart.associated_multipliers(*system.grid.node_coordinates(base_node))
    return 0.0 if multipliers is None else float(multipliers[2])


def build_associated(
    guichard_system: OrthogonalSystem,
    c: float = 0.0,
    base_node: Sequence[int] = (0, 0, 0),
    h3_base_value: float | None = None,
    base_point: Sequence[float] = (0.0, 0.0, 0.0),
) -> tuple[AssociatedFamily, OrthogonalSystem]:
    """
    Builds the associated family of a Guichard net and its member at parameter c.

    Args:
        guichard_system (OrthogonalSystem): seed Guichard net.
        c (float): family parameter, multipliers h_i + c.
        base_node: node anchoring h_3 and the associated parametrizations.
        h3_base_value (float, optional): h_3 at the base node; defaults to the closed-form
            catalog value when the seed is a catalog chart, else 0.
        base_point: f^_0 at the base node; the member at c is anchored at base_point + c f(base).

    Returns:
        tuple: (AssociatedFamily, associated system at c).

    Raises:
        PreconditionError: if the seed is not a Guichard net.
        IntegrabilityError: if the h_3 gradient is not closed.
    """
    base_node = check_node(guichard_system.grid, base_node)
    trace, _ = check_guichard(guichard_system)
    if exceeds_gate(trace):
        raise PreconditionError("Seed system is not a Guichard net", failures=[trace.name])

    H = guichard_system.H
    require_nonvanishing(H, "Lame coefficient")
    gradient3 = associated_h3_gradient(guichard_system)
    closedness = closedness_report("associated.h3_closedness", gradient3, guichard_system.grid)
    if exceeds_gate(closedness):
        raise IntegrabilityError("h_3 gradient system is not closed", report=closedness)

    if h3_base_value is None:
        h3_base_value = _default_h3_base(guichard_system, base_node)
    h3 = integrate_gradient(gradient3, guichard_system.grid.spacing, base_node, h3_base_value)

    dH = guichard_system.lame_gradient()
    q1 = H[1] / (H[0] * H[2])
    q2 = H[0] / (H[1] * H[2])
    h = np.stack((h3 + q1, h3 - q2, h3))
    gradient = np.stack(
        (
            gradient3 + _quotient_gradient(q1, dH, H, 1, (0, 2)),
            gradient3 - _quotient_gradient(q2, dH, H, 0, (1, 2)),
            gradient3,
        ),
        axis=1,
    )
    triple = CombescureTriple(h, guichard_system, gradient)

    anchor = {
        "base_node": list(base_node),
        "h3_base_value": float(h3_base_value),
        "base_point": [float(v) for v in base_point],
    }
    system_zero = _associated_member(guichard_system, triple, anchor, 0.0)
    family = AssociatedFamily(
        triple=triple,
        seed=guichard_system,
        system_zero=system_zero,
        anchor=anchor,
        diagnostics={closedness.name: closedness},
    )
    member = system_zero if c == 0 else associated_family_at(family, c)
    logger.info("Built associated system (c=%s) of %s", c, guichard_system.provenance)
    return family, member.with_diagnostics(
        [
            closedness,
            check_combescure(guichard_system, triple.shifted(c)),
            check_one_system(member),
            check_characterization(guichard_system, member),
        ]
    )


def _associated_member(seed, triple, anchor, c) -> OrthogonalSystem:
    base_node = tuple(anchor["base_node"])
    point = np.asarray(anchor["base_point"]) + c * seed.f[(slice(None),) + base_node]
    system = apply_combescure(seed, triple.shifted(c), base_node, point)
    provenance = dict(system.provenance, construction="associated", c=float(c), anchor=anchor)
    return replace(system, provenance=provenance)


def associated_family_at(family: AssociatedFamily, c: float) -> OrthogonalSystem:
    """
    Returns the member f^_c = f^_0 + c f (anchored) of an associated family.
    """
    return _associated_member(family.seed, family.triple, family.anchor, c)


def check_one_system(system: OrthogonalSystem) -> ResidualReport:
    """
    Residual of H_1^2 + H_2^2 - H_3^2 - 1.
    """
    trace = (_EPS_FIELD * system.H**2).sum(axis=0)
    return _report("associated.trace", [trace - 1.0], system, terms=[system.H**2, np.ones_like(trace)])


def check_characterization(
    guichard_system: OrthogonalSystem, comb_system: OrthogonalSystem
) -> ResidualReport:
    """
    Residual of H_i H^_j - H_j H^_i - eps_k H_k over the cyclic triples (i, j, k).
    """
    H, Hc = guichard_system.H, comb_system.H
    residuals, terms = [], []
    for i, j, k in CYCLIC:
        left, right, target = H[i] * Hc[j], H[j] * Hc[i], _EPS[k] * H[k]
        residuals.append(left - right - target)
        terms.extend((left, right, target))
    return _report("characterization", residuals, guichard_system, terms=terms)


def dual_triple(family: AssociatedFamily, c: float) -> CombescureTriple:
    """
    Returns the star multipliers h*_i = -(h_i + c)^2 + eps_i / H_i^2 with their gradient.
    """
    seed = family.seed
    H = seed.H
    dH = seed.lame_gradient()
    shifted = family.triple.h + c
    eps = _EPS_FIELD
    star = -(shifted**2) + eps / H**2
    gradient = -2.0 * shifted[None] * family.triple.derivatives() - 2.0 * eps[None] * dH / H[None] ** 3
    return CombescureTriple(star, seed, gradient)


def build_dual(
    guichard_system: OrthogonalSystem,
    family: AssociatedFamily,
    c: float = 0.0,
    base_node: Sequence[int] | None = None,
    base_point: Sequence[float] | None = None,
) -> OrthogonalSystem:
    """
    Builds the dual Guichard net of parameter c by a Combescure transform with the star
    multipliers. Anchoring defaults to the family's base node and the origin.
    """
    base_node = family.base_node if base_node is None else check_node(guichard_system.grid, base_node)
    base_point = (0.0, 0.0, 0.0) if base_point is None else base_point
    dual = apply_combescure(guichard_system, dual_triple(family, c), base_node, base_point)
    anchor = dict(family.anchor, dual_base_node=list(base_node), dual_base_point=[float(v) for v in base_point])
    provenance = dict(dual.provenance, construction="dual", c=float(c), anchor=anchor)
    dual = replace(dual, provenance=provenance)
    logger.info("Built dual system (c=%s) of %s", c, guichard_system.provenance)
    return dual.with_diagnostics(check_guichard(dual))


def _combine(terms, base_node, anchor_point, N, beta, provenance) -> OrthogonalSystem:
    # sum_s a_s (f_s - f_s(base)) + anchor, H and dH combined linearly
    first = terms[0][1]
    index = (slice(None),) + tuple(base_node)
    f = np.asarray(anchor_point, dtype=float).reshape((3,) + (1,) * 3) + sum(
        a * (s.f - s.f[index].reshape((3,) + (1,) * 3)) for a, s in terms
    )
    H = sum(a * s.H for a, s in terms)
    dH = None
    if all(s.dH is not None for _, s in terms):
        dH = sum(a * s.dH for a, s in terms)
    return OrthogonalSystem(
        grid=first.grid,
        f=f,
        H=H,
        N=N,
        beta=beta,
        dH=dH,
        provenance=provenance,
        degenerate=any(s.degenerate for _, s in terms),
    )


def dual_at_parameter(
    seed: OrthogonalSystem, family: AssociatedFamily, dual_zero: OrthogonalSystem, c: float
) -> OrthogonalSystem:
    """
    Returns f*_c = f*_0 - 2c f^_0 - c^2 f, with every term taken relative to its value at the
    base node so that f*_c and f*_0 coincide there.

    Raises:
        PreconditionError: if dual_zero was not built at c = 0 with the family's anchoring.
    """
    provenance = dual_zero.provenance
    if provenance.get("construction") != "dual" or provenance.get("c") != 0.0:
        raise PreconditionError("dual_zero must be the dual system of parameter 0")
    anchor = provenance.get("anchor", {})
    if any(anchor.get(key) != value for key, value in family.anchor.items()):
        raise PreconditionError("dual_zero was built with a different anchoring than the family")
    if c == 0:
        return dual_zero

    base_node = tuple(anchor["dual_base_node"])
    index = (slice(None),) + base_node
    return _combine(
        [(1.0, dual_zero), (-2.0 * c, family.system_zero), (-(c**2), seed)],
        base_node,
        dual_zero.f[index],
        dual_zero.N,
        dual_zero.beta,
        dict(provenance, c=float(c), combination="f*_0 - 2c f^_0 - c^2 f"),
    )


def check_gsystem_relation(
    f_sys: OrthogonalSystem, assoc_sys: OrthogonalSystem, dual_sys: OrthogonalSystem
) -> ResidualReport:
    """
    Residual of H_i H*_j + H_j H*_i + 2 H^_i H^_j over the pairs i < j; the per-pair sup, taken
    over the same evaluation region, is listed under details["pairs"].

    Raises:
        PreconditionError: if the three systems do not share their rotational coefficients.
    """
    failures = [
        report.name
        for report in (
            check_shared_beta(f_sys, assoc_sys, "shared_beta.associated"),
            check_shared_beta(f_sys, dual_sys, "shared_beta.dual"),
        )
        if exceeds_gate(report)
    ]
    if failures:
        raise PreconditionError("Systems are not Combescure related", failures=failures)

    H, Hs, Hc = f_sys.H, dual_sys.H, assoc_sys.H
    residuals, terms, pairs = [], [], {}
    for i, j in PAIRS:
        first, second, third = H[i] * Hs[j], H[j] * Hs[i], 2.0 * Hc[i] * Hc[j]
        residual = first + second + third
        residuals.append(residual)
        terms.extend((first, second, third))
        pair = _report("gsystem_relation.pair", [residual], f_sys, terms=[first, second, third])
        pairs[f"{i + 1}{j + 1}"] = pair.sup
    return _report("gsystem_relation", residuals, f_sys, terms=terms, details={"pairs": pairs})


def check_dual_guichard_relation(assoc_sys: OrthogonalSystem, dual_sys: OrthogonalSystem) -> ResidualReport:
    """
    Residual of H*_i H^_j - H*_j H^_i + eps_k H*_k over the cyclic triples: the associated
    system of a Guichard net is also associated to its dual.
    """
    Hs, Hc = dual_sys.H, assoc_sys.H
    residuals, terms = [], []
    for i, j, k in CYCLIC:
        left, right, target = Hs[i] * Hc[j], Hs[j] * Hc[i], _EPS[k] * Hs[k]
        residuals.append(left - right + target)
        terms.extend((left, right, target))
    return _report("dual_characterization", residuals, dual_sys, terms=terms)


def check_three_point_relation(
    first: OrthogonalSystem, second: OrthogonalSystem, third: OrthogonalSystem
) -> ResidualReport:
    """
    Three members of one associated family satisfy f^_1 - f^_3 = lambda (f^_2 - f^_3) with a
    constant lambda = (c_1 - c_3)/(c_2 - c_3). lambda is fitted by least squares and
    reported under details["lambda"].
    """
    left = (first.f - third.f).ravel()
    right = (second.f - third.f).ravel()
    solution, *_ = np.linalg.lstsq(right[:, None], left, rcond=None)
    ratio = float(solution[0])
    residual = (first.f - third.f) - ratio * (second.f - third.f)
    return _report(
        "three_point_relation",
        [residual],
        first,
        terms=[first.f - third.f],
        details={"lambda": ratio},
    )


def dual_family_of_dual(
    seed: OrthogonalSystem,
    assoc_sys: OrthogonalSystem,
    dual_sys: OrthogonalSystem,
    d: float,
    base_node: Sequence[int] = (0, 0, 0),
) -> tuple[OrthogonalSystem, OrthogonalSystem]:
    """
    Associated and dual members of parameter d of a dual system f*:

        f^_d = f^ + d f*,    (f*)*_d = f - 2d f^ - d^2 f*.

    The d = 0 dual is the seed again. Both results coincide with the seed at the base node.
    """
    base_node = check_node(seed.grid, base_node)
    index = (slice(None),) + base_node
    anchor = seed.f[index]
    associated = _combine(
        [(1.0, assoc_sys), (d, dual_sys)],
        base_node,
        assoc_sys.f[index],
        seed.N,
        seed.beta,
        {"construction": "associated_of_dual", "d": float(d), "parent": dual_sys.provenance},
    )
    dual = _combine(
        [(1.0, seed), (-2.0 * d, assoc_sys), (-(d**2), dual_sys)],
        base_node,
        anchor,
        seed.N,
        seed.beta,
        {"construction": "dual_of_dual", "d": float(d), "parent": dual_sys.provenance},
    )
    return associated, dual


__all__ = [
    "AssociatedFamily",
    "DualFamily",
    "check_guichard",
    "build_associated",
    "associated_family_at",
    "check_characterization",
    "build_dual",
    "dual_at_parameter",
    "check_gsystem_relation",
    "check_dual_guichard_relation",
    "check_three_point_relation",
    "dual_family_of_dual",
]
