"""
Coordinate surfaces of triply orthogonal systems.

The slice x_i = const of a system is a curvature-line parametrized surface in the two
remaining coordinates (x_j, x_k), j < k, called (x, y) here. Its first fundamental form is
H_1^2 dx^2 + H_2^2 dy^2 with H_1 = H_j, H_2 = H_k, and its principal curvatures are
kappa_1 = -beta_ij / H_j and kappa_2 = -beta_ik / H_k.

A Combescure transform of a slice is given by a pair of multipliers (h, l) with

    d_y h = (l - h) d_y ln H_1,   d_x l = (h - l) d_x ln H_2.

The slice is a G-surface when c H_1^2 H_2^2 (h - l)^2 = H_2^2 + eps H_1^2 for an associated pair;
the dual pair is (h*, l*) = delta (-h^2 + 1/H_1^2, -l^2 + eps/H_2^2).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from combescure import CombescureTriple
from config import EPSILON
from exceptions.error import IntegrabilityError, PreconditionError
from grid import integrate_gradient, lattice_difference, lattice_slice
from logger import get_logger
from residuals import (
    ResidualReport,
    current_policy,
    exceeds_gate,
    field_scale,
    nonvanishing,
    residual_report,
)
from tos_core import OrthogonalSystem

logger = get_logger(__name__)


def slice_directions(axis: int) -> tuple[int, int]:
    """
    Returns the 0-based lattice axes (j, k), j < k, spanning the slice x_axis = const.
    """
    if axis not in (1, 2, 3):
        raise ValueError(f"Axis must be 1, 2 or 3, got {axis}")
    j, k = [m for m in range(3) if m != axis - 1]
    return j, k


def signature_epsilon(axis: int) -> float:
    """
    The slice sign eps = -eps_i eps_j induced by the Guichard signature: +1 for x_3 = const,
    -1 for the two other families. With it H_2^2 + eps H_1^2 = H_i^2 on a Guichard net.
    """
    j, _ = slice_directions(axis)
    return -EPSILON[axis - 1] * EPSILON[j]


@dataclass(frozen=True)
class SurfaceSlice:
    """
    Restriction of a system to the coordinate surface x_axis = lattice index `index`.

    Arrays are 2-D over (x, y) = (x_j, x_k); dH1 and dH2 stack the (d_x, d_y) derivatives.
    """

    axis: int
    index: int
    parent: OrthogonalSystem
    spacing: tuple[float, float]
    f: np.ndarray
    N: np.ndarray
    H1: np.ndarray
    H2: np.ndarray
    dH1: np.ndarray
    dH2: np.ndarray
    kappa1: np.ndarray
    kappa2: np.ndarray
    mask: np.ndarray
    umbilic: bool

    @property
    def directions(self) -> tuple[int, int]:
        return slice_directions(self.axis)

    @property
    def epsilon(self) -> float:
        return signature_epsilon(self.axis)

    def metric(self) -> np.ndarray:
        """
        Returns (H_1^2, H_2^2), the coefficients of the slice metric.
        """
        return np.stack((self.H1**2, self.H2**2))

    def summary(self) -> dict:
        return {"parent": self.parent.grid.summary(), "axis": self.axis, "index": self.index}

    def log_derivatives(self) -> tuple[np.ndarray, np.ndarray]:
        """
        Returns (d_y ln H_1, d_x ln H_2), masked to zero where H vanishes.
        """
        safe1 = np.where(self.mask, self.H1, 1.0)
        safe2 = np.where(self.mask, self.H2, 1.0)
        return self.dH1[1] / safe1, self.dH2[0] / safe2

    def restrict(self, values) -> np.ndarray:
        """
        Restricts a parent-grid array (trailing three lattice axes) to this slice.
        """
        return lattice_slice(values, self.axis, self.index)


def _derivative(values, surface: SurfaceSlice, direction: int) -> np.ndarray:
    return lattice_difference(values, surface.spacing, direction)


def _report(name, residuals, surface: SurfaceSlice, **kwargs) -> ResidualReport:
    return residual_report(
        name, residuals, spacing=surface.spacing, grid_summary=surface.summary(), **kwargs
    )


def extract_slice(system: OrthogonalSystem, axis: int, index: int) -> SurfaceSlice:
    """
    Extracts the coordinate surface x_axis = const at lattice `index` with its principal
    curvatures. The umbilic flag holds when kappa_1 = kappa_2 within tolerance everywhere.
    """
    i = axis - 1
    j, k = slice_directions(axis)
    grid = system.grid
    dH = system.lame_gradient()

    def cut(values):
        return lattice_slice(values, axis, index)

    H1, H2 = cut(system.H[j]), cut(system.H[k])
    mask = nonvanishing(np.stack((H1, H2)), ndim=2)
    kappa1 = -cut(system.beta[i, j]) / np.where(mask, H1, 1.0)
    kappa2 = -cut(system.beta[i, k]) / np.where(mask, H2, 1.0)
    spacing = (grid.spacing[j], grid.spacing[k])

    difference = kappa1 - kappa2
    tolerance = current_policy().tolerance(spacing, field_scale(kappa1, kappa2))
    umbilic = bool(np.all(np.abs(difference[mask]) <= tolerance))

    return SurfaceSlice(
        axis=axis,
        index=index,
        parent=system,
        spacing=spacing,
        f=cut(system.f),
        N=cut(system.N[i]),
        H1=H1,
        H2=H2,
        dH1=np.stack((cut(dH[j, j]), cut(dH[k, j]))),
        dH2=np.stack((cut(dH[j, k]), cut(dH[k, k]))),
        kappa1=kappa1,
        kappa2=kappa2,
        mask=mask,
        umbilic=umbilic,
    )


@dataclass(frozen=True)
class SurfaceCombescurePair:
    """
    Multipliers (h, l) of a Combescure transform of a slice, with optional exact gradients
    (d_x, d_y) stacked in gradient_h and gradient_l. Star pairs keep the pair they are dual to
    in `associated`.
    """

    h: np.ndarray
    l: np.ndarray
    gradient_h: np.ndarray | None = None
    gradient_l: np.ndarray | None = None
    associated: SurfaceCombescurePair | None = None
    diagnostics: dict = field(default_factory=dict)

    @classmethod
    def constant(cls, surface: SurfaceSlice, h: float, l: float | None = None) -> SurfaceCombescurePair:
        """
        The scaling pair (h, l) with constant multipliers; l defaults to h.
        """
        shape = surface.H1.shape
        zero = np.zeros((2,) + shape)
        return cls(np.full(shape, float(h)), np.full(shape, float(h if l is None else l)), zero, zero)

    @property
    def delta(self) -> np.ndarray:
        """
        Orientation sign of the transform, sign(h l).
        """
        return np.sign(self.h * self.l)

    def derivatives(self, surface: SurfaceSlice) -> tuple[np.ndarray, np.ndarray]:
        dh = self.gradient_h
        dl = self.gradient_l
        if dh is None:
            dh = np.stack([_derivative(self.h, surface, a) for a in (0, 1)])
        if dl is None:
            dl = np.stack([_derivative(self.l, surface, a) for a in (0, 1)])
        return dh, dl

    def curvatures(self, surface: SurfaceSlice) -> tuple[np.ndarray, np.ndarray]:
        """
        Returns the transformed principal curvatures delta kappa_1 / h and delta kappa_2 / l
        (infinite where a multiplier vanishes).
        """
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.delta * surface.kappa1 / self.h, self.delta * surface.kappa2 / self.l


def check_pair_compatibility(surface: SurfaceSlice, pair: SurfaceCombescurePair) -> ResidualReport:
    """
    Residual of d_y h = (l - h) d_y ln H_1 and d_x l = (h - l) d_x ln H_2.
    """
    dh, dl = pair.derivatives(surface)
    log_y1, log_x2 = surface.log_derivatives()
    first = (pair.l - pair.h) * log_y1
    second = (pair.h - pair.l) * log_x2
    return _report(
        "surface_pair.compatibility",
        [dh[1] - first, dl[0] - second],
        surface,
        terms=[dh[1], first, dl[0], second],
        mask=surface.mask,
    )


def restrict_triple(triple: CombescureTriple, axis: int, index: int) -> SurfaceCombescurePair:
    """
    The pair (h_j, h_k) induced on the slice x_axis = const by a system multiplier triple.
    """
    j, k = slice_directions(axis)

    def cut(values):
        return lattice_slice(values, axis, index)

    gradient_h = gradient_l = None
    if triple.gradient is not None:
        gradient_h = np.stack((cut(triple.gradient[j, j]), cut(triple.gradient[k, j])))
        gradient_l = np.stack((cut(triple.gradient[j, k]), cut(triple.gradient[k, k])))
    return SurfaceCombescurePair(cut(triple.h[j]), cut(triple.h[k]), gradient_h, gradient_l)


def check_surface_point_solution(surface: SurfaceSlice, theta) -> ResidualReport:
    """
    Residual of the point equation d_xy theta = d_y ln H_1 d_x theta + d_x ln H_2 d_y theta
    for a 2-D field (or stacked fields) theta.
    """
    theta = np.asarray(theta, dtype=float)
    log_y1, log_x2 = surface.log_derivatives()
    d_x = _derivative(theta, surface, 0)
    d_y = _derivative(theta, surface, 1)
    mixed = _derivative(d_x, surface, 1)
    first, second = log_y1 * d_x, log_x2 * d_y
    return _report(
        "surface_point_equation",
        [mixed - first - second],
        surface,
        terms=[mixed, first, second],
        mask=surface.mask,
    )


@dataclass(frozen=True)
class GReport:
    """
    G-surface condition of a slice and pair for given eps and c. `fixed` checks
    c H_1^2 H_2^2 (h - l)^2 = H_2^2 + eps H_1^2; `reparametrized` checks
    c (h - l)^2 = 1/(chi_1^2 H_1^2) + eps/(chi_2^2 H_2^2) with fitted chi_1(x), chi_2(y).
    """

    epsilon: float
    c: float
    fixed: ResidualReport
    reparametrized: ResidualReport | None = None
    chi1: np.ndarray | None = None
    chi2: np.ndarray | None = None
    nontrivial: bool = True

    @property
    def passed(self) -> bool:
        return self.fixed.passed or (self.reparametrized is not None and self.reparametrized.passed)

    def to_dict(self) -> dict:
        data = {
            "epsilon": self.epsilon,
            "c": self.c,
            "pass": self.passed,
            "nontrivial": self.nontrivial,
            "fixed": self.fixed.to_dict(),
        }
        if self.reparametrized is not None:
            data["reparametrized"] = self.reparametrized.to_dict()
            data["chi1"] = None if self.chi1 is None else self.chi1.tolist()
            data["chi2"] = None if self.chi2 is None else self.chi2.tolist()
        return data


def _fit_reparametrization(surface: SurfaceSlice, target: np.ndarray, epsilon: float, mask: np.ndarray):
    """
    Least-squares fit of target = a(x)/H_1^2 + eps b(y)/H_2^2 with a, b > 0.
    Returns (chi1, chi2) = (a^-1/2, b^-1/2), or None when the fit is ill-conditioned.
    """
    rows, columns = target.shape
    nodes = np.argwhere(mask)
    if nodes.size == 0:
        return None
    use_b = epsilon != 0
    design = np.zeros((len(nodes), rows + (columns if use_b else 0)))
    a_index, b_index = nodes[:, 0], nodes[:, 1]
    design[np.arange(len(nodes)), a_index] = 1.0 / surface.H1[a_index, b_index] ** 2
    if use_b:
        design[np.arange(len(nodes)), rows + b_index] = epsilon / surface.H2[a_index, b_index] ** 2
    solution, _, rank, _ = np.linalg.lstsq(design, target[a_index, b_index], rcond=None)
    if rank < design.shape[1] - (1 if use_b else 0):
        return None
    a = solution[:rows]
    b = solution[rows:] if use_b else np.ones(columns)
    if np.any(a <= 0) or np.any(b <= 0):
        return None
    return 1.0 / np.sqrt(a), 1.0 / np.sqrt(b)


def check_G_condition(
    surface: SurfaceSlice,
    pair: SurfaceCombescurePair,
    epsilon: float,
    c: float = 1.0,
    fit: bool = False,
) -> GReport:
    """
    Evaluates the G-surface condition, written with h - l so that vanishing multipliers
    are harmless. With fit=True, chi_1(x) and chi_2(y) of the reparametrized form are fitted
    by linear least squares; when the fit is ill-conditioned the fixed form is kept.
    """
    if c == 0:
        raise ValueError("The G-surface constant c must not vanish")
    difference = pair.h - pair.l
    H1sq, H2sq = surface.H1**2, surface.H2**2
    left = c * H1sq * H2sq * difference**2
    right = H2sq + epsilon * H1sq
    fixed = _report(
        "g_condition.fixed",
        [left - right],
        surface,
        terms=[left, H2sq, H1sq],
        mask=surface.mask,
    )
    nontrivial = bool(np.any(np.abs(difference[surface.mask]) > current_policy().mask_threshold))

    reparametrized = chi1 = chi2 = None
    if fit:
        target = c * difference**2
        fitted = _fit_reparametrization(surface, target, epsilon, surface.mask)
        if fitted is None:
            logger.info("chi fit ill-conditioned on slice %s/%s, keeping the fixed form", surface.axis, surface.index)
        else:
            chi1, chi2 = fitted
            model = 1.0 / (chi1[:, None] ** 2 * H1sq) + epsilon / (chi2[None, :] ** 2 * H2sq)
            reparametrized = _report(
                "g_condition.reparametrized",
                [target - model],
                surface,
                terms=[target, model],
                mask=surface.mask,
            )
    return GReport(
        epsilon=float(epsilon),
        c=float(c),
        fixed=fixed,
        reparametrized=reparametrized,
        chi1=chi1,
        chi2=chi2,
        nontrivial=nontrivial,
    )


def surface_dual(
    surface: SurfaceSlice,
    pair: SurfaceCombescurePair,
    epsilon: float,
    sign: float = 1.0,
    c: float = 1.0,
) -> SurfaceCombescurePair:
    """
    Returns the star pair sign * (-h^2 + 1/H_1^2, -l^2 + eps/H_2^2) of an associated pair.

    The G-condition and dual-relation reports are attached to the result's diagnostics.

    Raises:
        IntegrabilityError: if the star pair is not compatible beyond the gate tolerance,
            which signals a violated G-condition.
    """
    if sign not in (1, -1):
        raise ValueError(f"Sign must be +1 or -1, got {sign}")
    dh, dl = pair.derivatives(surface)
    safe1 = np.where(surface.mask, surface.H1, 1.0)
    safe2 = np.where(surface.mask, surface.H2, 1.0)
    h_star = sign * (-pair.h**2 + 1.0 / safe1**2)
    l_star = sign * (-pair.l**2 + epsilon / safe2**2)
    gradient_h = sign * (-2.0 * pair.h[None] * dh - 2.0 * surface.dH1 / safe1[None] ** 3)
    gradient_l = sign * (-2.0 * pair.l[None] * dl - 2.0 * epsilon * surface.dH2 / safe2[None] ** 3)
    star = SurfaceCombescurePair(h_star, l_star, gradient_h, gradient_l, associated=pair)

    condition = check_G_condition(surface, pair, epsilon, c)
    compatibility = check_pair_compatibility(surface, star)
    if exceeds_gate(compatibility):
        raise IntegrabilityError(
            "Dual pair is not integrable; the G-condition fails on this slice", report=compatibility
        )
    relation = check_dual_relation(surface, pair, star)
    return SurfaceCombescurePair(
        h_star,
        l_star,
        gradient_h,
        gradient_l,
        associated=pair,
        diagnostics={
            condition.fixed.name: condition.fixed,
            compatibility.name: compatibility,
            relation.name: relation,
        },
    )


def check_dual_relation(
    surface: SurfaceSlice, pair: SurfaceCombescurePair, star_pair: SurfaceCombescurePair
) -> ResidualReport:
    """
    Residual of h* + l* + 2 h l = 0, the multiplier form of
    1/(kappa_1 kappa_2*) + 1/(kappa_2 kappa_1*) = -2/(kappa^_1 kappa^_2). The non-triviality
    flags (h* != -h^2, l* != -l^2 somewhere) are stored under details.
    """
    product = 2.0 * pair.h * pair.l
    residual = star_pair.h + star_pair.l + product
    threshold = current_policy().tolerance(surface.spacing, field_scale(star_pair.h, star_pair.l, pair.h**2))
    first = bool(np.any(np.abs((star_pair.h + pair.h**2)[surface.mask]) > threshold))
    second = bool(np.any(np.abs((star_pair.l + pair.l**2)[surface.mask]) > threshold))
    return _report(
        "dual_relation",
        [residual],
        surface,
        terms=[star_pair.h, star_pair.l, product],
        mask=surface.mask,
        details={"nontrivial_1": first, "nontrivial_2": second, "nontrivial": first or second},
    )


def omega_criterion(surface: SurfaceSlice, pair: SurfaceCombescurePair) -> np.ndarray:
    """
    Boolean field of the nodes where l kappa_1 - h kappa_2 = 0 within tolerance.
    """
    value = pair.l * surface.kappa1 - pair.h * surface.kappa2
    scale = field_scale(pair.l * surface.kappa1, pair.h * surface.kappa2)
    return np.abs(value) <= current_policy().tolerance(surface.spacing, scale)


def check_demoulin(
    surface: SurfaceSlice, star_pair: SurfaceCombescurePair, epsilon: float
) -> ResidualReport:
    """
    Residual of the associated-surface curvature identity

        (1/k1 - 1/k2)(1/k1* - 1/k2*) = 1/(k1^2 H_1^2) + eps/(k2^2 H_2^2) - (1/k^1 - 1/k^2)^2,

    i.e. (a - b)(a h* - b l*) = a^2/H_1^2 + eps b^2/H_2^2 - (a h - b l)^2 with a = 1/k1, b = 1/k2.
    Umbilic and zero-curvature nodes are masked; details carry the Omega criterion
    l k1 - h k2 = 0.
    """
    pair = star_pair.associated
    if pair is None:
        raise PreconditionError("check_demoulin needs a star pair built by surface_dual")
    threshold = current_policy().mask_threshold
    kappa1, kappa2 = surface.kappa1, surface.kappa2
    scale = field_scale(kappa1, kappa2) or 1.0
    mask = (
        surface.mask
        & (np.abs(kappa1) > threshold * scale)
        & (np.abs(kappa2) > threshold * scale)
        & (np.abs(kappa1 - kappa2) > current_policy().tolerance(surface.spacing, scale))
    )
    details = {}
    if not mask.any():
        details["degenerate"] = "totally umbilic" if surface.umbilic else "vanishing curvature"
    a = 1.0 / np.where(mask, kappa1, 1.0)
    b = 1.0 / np.where(mask, kappa2, 1.0)
    left = (a - b) * (a * star_pair.h - b * star_pair.l)
    safe1 = np.where(surface.mask, surface.H1, 1.0)
    safe2 = np.where(surface.mask, surface.H2, 1.0)
    right = a**2 / safe1**2 + epsilon * b**2 / safe2**2 - (a * pair.h - b * pair.l) ** 2
    omega = omega_criterion(surface, pair)
    details["omega_criterion"] = bool(omega[surface.mask].all())
    return _report(
        "demoulin",
        [left - right],
        surface,
        terms=[left, right],
        mask=mask,
        details=details,
    )


def check_phi_equation(surface: SurfaceSlice, phi) -> ResidualReport:
    """
    Residual of d_xy phi + d_y ln H_1 d_x phi + d_x ln H_2 d_y phi + phi d_xy ln(H_1 H_2).
    """
    phi = np.asarray(phi, dtype=float)
    log_y1, log_x2 = surface.log_derivatives()
    d_x = _derivative(phi, surface, 0)
    d_y = _derivative(phi, surface, 1)
    mixed = _derivative(d_x, surface, 1)
    log_mixed = _derivative(log_y1, surface, 0) + _derivative(log_x2, surface, 1)
    pieces = [mixed, log_y1 * d_x, log_x2 * d_y, phi * log_mixed]
    return _report("eisenhart.phi_equation", [sum(pieces)], surface, terms=pieces, mask=surface.mask)


def eisenhart_pair_from_phi(
    surface: SurfaceSlice,
    phi,
    constant: float = 0.0,
    base_node: Sequence[int] = (0, 0),
) -> SurfaceCombescurePair:
    """
    Integrates d_x h = phi d_x ln H_2 + d_x phi, d_y h = -phi d_y ln H_1 with h = constant at
    `base_node` and returns the pair (h, h - phi).

    Raises:
        PreconditionError: if phi does not solve its second-order equation.
        IntegrabilityError: if the gradient of h is not closed.
    """
    phi = np.asarray(phi, dtype=float)
    equation = check_phi_equation(surface, phi)
    if exceeds_gate(equation):
        raise PreconditionError("phi does not solve the point equation of the pair", failures=[equation.name])

    log_y1, log_x2 = surface.log_derivatives()
    d_phi = np.stack([_derivative(phi, surface, a) for a in (0, 1)])
    gradient = np.stack((phi * log_x2 + d_phi[0], -phi * log_y1))

    cross_x = _derivative(gradient[1], surface, 0)
    cross_y = _derivative(gradient[0], surface, 1)
    closedness = _report(
        "eisenhart.closedness", [cross_x - cross_y], surface, terms=[cross_x, cross_y], mask=surface.mask
    )
    if exceeds_gate(closedness):
        raise IntegrabilityError("Gradient of h is not closed", report=closedness)

    h = integrate_gradient(gradient, surface.spacing, tuple(base_node), constant)
    return SurfaceCombescurePair(
        h,
        h - phi,
        gradient,
        gradient - d_phi,
        diagnostics={equation.name: equation, closedness.name: closedness},
    )


def isothermic_dual_pair(surface: SurfaceSlice, c: float = 0.0, sign: float = 1.0) -> SurfaceCombescurePair:
    """
    Dual pairs of an isothermic slice (H_1 = H_2 = e^psi) with respect to the scaling pair (c, c):
    (h*, l*) = sign (-c^2 + e^(-2 psi), -c^2 - e^(-2 psi)); at c = 0 the Christoffel dual.
    """
    isothermic = _report(
        "isothermic",
        [surface.H1 - surface.H2],
        surface,
        terms=[surface.H1, surface.H2],
        mask=surface.mask,
        pointwise=True,
    )
    if not isothermic.passed or exceeds_gate(isothermic):
        raise PreconditionError("Slice is not isothermic", failures=[isothermic.name])
    return surface_dual(surface, SurfaceCombescurePair.constant(surface, c), -1.0, sign)


def check_channel_form(surface: SurfaceSlice, pair: SurfaceCombescurePair) -> tuple[ResidualReport, ResidualReport]:
    """
    Detector for eps = 0: h - l = +-1/H_1^2 (the better sign is reported) and one principal
    curvature constant along its curvature line (d_x kappa_1 = 0 or d_y kappa_2 = 0).
    """
    inverse = 1.0 / np.where(surface.mask, surface.H1, 1.0) ** 2
    difference = pair.h - pair.l
    plus = _report("channel.form", [difference - inverse], surface, terms=[difference, inverse], mask=surface.mask)
    minus = _report("channel.form", [difference + inverse], surface, terms=[difference, inverse], mask=surface.mask)
    form = plus if plus.sup <= minus.sup else minus

    along_x = _derivative(surface.kappa1, surface, 0)
    along_y = _derivative(surface.kappa2, surface, 1)
    terms = [surface.kappa1, surface.kappa2]
    first = _report("channel.curvature", [along_x], surface, terms=terms, mask=surface.mask)
    second = _report("channel.curvature", [along_y], surface, terms=terms, mask=surface.mask)
    return form, first if first.sup <= second.sup else second


@dataclass(frozen=True)
class FamilyAnalysis:
    """
    Geometry of the coordinate family x_axis = const.
    """

    axis: int
    parallel: bool
    totally_umbilic: bool
    cyclic: bool
    torsion: np.ndarray
    reports: tuple[ResidualReport, ...]

    def to_dict(self) -> dict:
        return {
            "axis": self.axis,
            "parallel": self.parallel,
            "totally_umbilic": self.totally_umbilic,
            "cyclic": self.cyclic,
            "reports": [report.to_dict() for report in self.reports],
        }


def analyze_family(system: OrthogonalSystem, axis: int) -> FamilyAnalysis:
    """
    Classifies the family x_i = const:
    - parallel iff beta_ji = beta_ki = 0,
    - totally umbilic iff kappa_ij = kappa_ik,
    - cyclic iff d_i kappa_ji = d_i kappa_ki = 0,
    and returns the torsion (kappa_ji d_i kappa_ki - kappa_ki d_i kappa_ji)/(kappa_ji^2 + kappa_ki^2)
    of the x_i-curves, masked where the denominator vanishes.
    """
    i = axis - 1
    j, k = slice_directions(axis)
    grid, H, beta = system.grid, system.H, system.beta
    mask = nonvanishing(H)
    safe = np.where(mask, H, 1.0)

    def report(name, residuals, **kwargs):
        return residual_report(name, residuals, spacing=grid.spacing, grid_summary=grid.summary(), **kwargs)

    parallel = report(f"family{axis}.parallel", [beta[j, i], beta[k, i]], terms=[beta], mask=mask)

    kappa_ij = -beta[i, j] / safe[j]
    kappa_ik = -beta[i, k] / safe[k]
    umbilic = report(
        f"family{axis}.umbilic", [kappa_ij - kappa_ik], terms=[kappa_ij, kappa_ik], mask=mask
    )

    kappa_ji = -beta[j, i] / safe[i]
    kappa_ki = -beta[k, i] / safe[i]
    d_ji = lattice_difference(kappa_ji, grid.spacing, i)
    d_ki = lattice_difference(kappa_ki, grid.spacing, i)
    cyclic = report(f"family{axis}.cyclic", [d_ji, d_ki], terms=[kappa_ji, kappa_ki], mask=mask)

    denominator = kappa_ji**2 + kappa_ki**2
    torsion_mask = mask & nonvanishing(denominator)
    torsion = np.where(
        torsion_mask, (kappa_ji * d_ki - kappa_ki * d_ji) / np.where(torsion_mask, denominator, 1.0), 0.0
    )
    torsion_report = report(
        f"family{axis}.torsion",
        [torsion],
        terms=[kappa_ji, kappa_ki],
        mask=torsion_mask,
    )
    return FamilyAnalysis(
        axis=axis,
        parallel=parallel.passed,
        totally_umbilic=umbilic.passed,
        cyclic=cyclic.passed,
        torsion=torsion,
        reports=(parallel, umbilic, cyclic, torsion_report),
    )
