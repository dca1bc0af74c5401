"""
Triply orthogonal systems: the OrthogonalSystem type, its fundamental quantities and the
residual checks of the classical theory.

A system on a GridSpec carries
- f: (3, n1, n2, n3) parametrization,
- H: (3, n1, n2, n3) signed Lame coefficients, d_i f = H_i N_i,
- N: (3, 3, n1, n2, n3) unit normals, N[i] = N_i,
- beta: (3, 3, n1, n2, n3) rotational coefficients beta_ij = (1/H_i) d_i H_j, zero diagonal,
- dH: optional exact (3, 3, n1, n2, n3) array dH[i, j] = d_i H_j (from closed-form charts).

All checks return ResidualReports and never raise on a failing residual; constructions raise
DegenerateSystemError where a required division is singular.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from config import EPSILON
from exceptions.error import DegenerateSystemError, PreconditionError
from grid import (
    GridSpec,
    ScalarField,
    VectorField,
    check_node,
    integrate_gradient,
    lattice_difference,
    lattice_gradient,
    lattice_slice,
)
from integrators import DEFAULT_ORDER, REVERSED_ORDER, march_lattice, orthonormality_defect
from logger import get_logger
from residuals import (
    ResidualReport,
    current_policy,
    field_scale,
    nonvanishing,
    residual_report,
)
from utils.exporters import write_obj

logger = get_logger(__name__)

CYCLIC = ((0, 1, 2), (1, 2, 0), (2, 0, 1))
PAIRS = ((0, 1), (0, 2), (1, 2))

__all__ = [
    "OrthogonalSystem",
    "ResidualReport",
    "ChiClassification",
    "build_from_parametrization",
    "rotational_coefficients",
    "beta_from_lame",
    "check_orthogonality",
    "check_frame_system",
    "check_gauss_equation",
    "check_lame",
    "check_lame_beta",
    "check_point_equation",
    "chi_trace",
    "classify_chi",
    "invert_system",
    "integrate_frame",
    "induced_metric",
    "compare_metrics",
    "export_slice_obj",
]


def third_index(i: int, j: int) -> int:
    """
    Returns the index k with {i, j, k} = {0, 1, 2}.
    """
    return 3 - i - j


@dataclass(frozen=True)
class OrthogonalSystem:
    """
    A sampled triply orthogonal system with its provenance.

    `degenerate` marks transforms carrying vanishing Lame coefficients; such systems are
    excluded from checks that divide by H.
    """

    grid: GridSpec
    f: np.ndarray
    H: np.ndarray
    N: np.ndarray
    beta: np.ndarray
    dH: np.ndarray | None = None
    provenance: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    degenerate: bool = False

    epsilon = EPSILON

    def lame_gradient(self, order: int | None = None) -> np.ndarray:
        """
        Returns dH[i, j] = d_i H_j, exact when the system carries it, else by finite differences.
        """
        if self.dH is not None:
            return self.dH
        return lattice_gradient(self.H, self.grid.spacing, order)

    def position(self) -> VectorField:
        return VectorField(self.grid, self.f)

    def lame(self, index: int) -> ScalarField:
        """
        Returns H_index (index 1..3) as a ScalarField.
        """
        return ScalarField(self.grid, self.H[index - 1])

    def with_diagnostics(self, reports: Sequence[ResidualReport]) -> OrthogonalSystem:
        diagnostics = dict(self.diagnostics)
        diagnostics.update({report.name: report for report in reports})
        return replace(self, diagnostics=diagnostics)

    def values_at(self, node: Sequence[int]) -> dict:
        """
        Returns f, H and the frame at a node as plain lists.
        """
        node = check_node(self.grid, node)
        index = (slice(None),) + node
        return {
            "node": list(node),
            "point": list(self.grid.node_coordinates(node)),
            "f": self.f[index].tolist(),
            "H": self.H[index].tolist(),
            "N": self.N[(slice(None), slice(None)) + node].tolist(),
        }

    def describe(self) -> dict:
        return {"provenance": self.provenance, "degenerate": self.degenerate}


def _derivative(values, grid: GridSpec, axis: int, order: int | None = None) -> np.ndarray:
    return lattice_difference(values, grid.spacing, axis, order)


def _report(name, residuals, grid: GridSpec, **kwargs) -> ResidualReport:
    return residual_report(name, residuals, spacing=grid.spacing, grid_summary=grid.summary(), **kwargs)


def _worst_node(magnitude: np.ndarray) -> tuple[int, ...]:
    return tuple(int(i) for i in np.unravel_index(int(np.argmax(magnitude)), magnitude.shape))


def require_nonvanishing(values, what: str, threshold: float | None = None):
    """
    Raises DegenerateSystemError at the node where `values` (leading axes reduced) is
    closest to zero relative to its scale, if it falls below the mask threshold there.
    """
    if threshold is None:
        threshold = current_policy().mask_threshold
    values = np.asarray(values, dtype=float)
    scale = field_scale(values) or 1.0
    magnitude = np.abs(values).reshape((-1,) + values.shape[values.ndim - 3 :]).min(axis=0)
    if not np.all(np.isfinite(values)) or magnitude.min() <= threshold * scale:
        raise DegenerateSystemError(f"{what} vanishes", node=_worst_node(-magnitude))


def beta_from_lame(H: np.ndarray, dH: np.ndarray) -> np.ndarray:
    """
    Returns beta_ij = dH[i, j] / H_i with a zero diagonal.
    """
    require_nonvanishing(H, "Lame coefficient")
    beta = dH / H[:, None]
    for i in range(3):
        beta[i, i] = 0.0
    return beta


def rotational_coefficients(system: OrthogonalSystem, order: int | None = None) -> np.ndarray:
    """
    Recomputes beta_ij = (1/H_i) d_i H_j from the Lame coefficients of a system.

    Args:
        system (OrthogonalSystem): system with nonvanishing H.
        order (int, optional): finite-difference order when the system has no exact dH.

    Returns:
        np.ndarray: (3, 3, n1, n2, n3) array, zero on the diagonal.
    """
    return beta_from_lame(system.H, system.lame_gradient(order))


def frame_generators(beta: np.ndarray) -> np.ndarray:
    """
    Generators of the frame system d_a N = M_a N with N stored row-wise:
    (M_a)[i, a] = beta_ia for i != a and (M_a)[a, m] = -beta_ma for m != a.
    """
    generators = np.zeros((3, 3, 3) + beta.shape[2:])
    for a in range(3):
        for i in range(3):
            if i != a:
                generators[a, i, a] = beta[i, a]
                generators[a, a, i] = -beta[i, a]
    return generators


def build_from_parametrization(
    f: VectorField, provenance: dict | None = None, order: int | None = None
) -> OrthogonalSystem:
    """
    Builds a system from sampled coordinates: H_i = |d_i f|, N_i = d_i f / H_i and the
    rotational coefficients from finite differences of H.

    An orthogonality residual above tolerance is logged as a warning and attached to the
    system diagnostics; the caller decides what to do with it.
    """
    grid = f.grid
    tangents = lattice_gradient(f.values, grid.spacing, order)
    jacobian = np.linalg.det(np.moveaxis(tangents, (0, 1), (-2, -1)))
    require_nonvanishing(jacobian, "Jacobian det(d_x f, d_y f, d_z f)")

    H = np.linalg.norm(tangents, axis=1)
    N = tangents / H[:, None]
    beta = beta_from_lame(H, lattice_gradient(H, grid.spacing, order))
    system = OrthogonalSystem(
        grid=grid,
        f=f.values,
        H=H,
        N=N,
        beta=beta,
        provenance=dict(provenance or {"construction": "parametrization"}),
    )

    reports = check_orthogonality(system, order=order)
    for report in reports:
        if not report.passed:
            logger.warning(
                "Orthogonality residual %s = %.3e exceeds tolerance %.3e",
                report.name,
                report.sup,
                report.tolerance,
            )
    logger.info("Built system from parametrization on grid %s", grid.counts)
    return system.with_diagnostics(reports)


def check_orthogonality(system: OrthogonalSystem, order: int | None = None) -> list[ResidualReport]:
    """
    Checks d_i f = H_i N_i, (N_i, N_j) = delta_ij, N_i = sigma N_j x N_k and
    det(d f) = sigma H1 H2 H3, where sigma = det(N1, N2, N3) is the frame orientation.
    """
    grid = system.grid
    tangents = lattice_gradient(system.f, grid.spacing, order)
    frame = np.moveaxis(system.N, (0, 1), (-2, -1))
    orientation = np.linalg.det(frame)

    expected = system.H[:, None] * system.N
    tangent = _report("orthogonality.tangent", [tangents - expected], grid, terms=[tangents, expected])

    gram = np.einsum("iadef,jadef->ijdef", system.N, system.N) - np.eye(3)[:, :, None, None, None]
    normals = _report("orthogonality.normals", [gram], grid, scale=1.0)

    cross = [
        system.N[i] - orientation * np.cross(system.N[j], system.N[k], axis=0) for i, j, k in CYCLIC
    ]
    cross_report = _report("orthogonality.cross", cross, grid, scale=1.0)

    jacobian = np.linalg.det(np.moveaxis(tangents, (0, 1), (-2, -1)))
    volume = orientation * np.prod(system.H, axis=0)
    determinant = _report(
        "orthogonality.determinant", [jacobian - volume], grid, terms=[jacobian, volume]
    )
    return [tangent, normals, cross_report, determinant]


def check_frame_system(system: OrthogonalSystem, order: int | None = None) -> list[ResidualReport]:
    """
    Residuals of the normal-frame system d_j N_i = beta_ij N_j (i != j) and
    d_i N_i = -beta_ji N_j - beta_ki N_k.
    """
    grid, N, beta = system.grid, system.N, system.beta
    dN = lattice_gradient(N, grid.spacing, order)
    off_diagonal, off_terms, diagonal, diagonal_terms = [], [], [], []
    for i in range(3):
        for j in range(3):
            if i != j:
                rhs = beta[i, j] * N[j]
                off_diagonal.append(dN[j, i] - rhs)
                off_terms.extend((dN[j, i], rhs))
        j, k = [m for m in range(3) if m != i]
        rhs = -beta[j, i] * N[j] - beta[k, i] * N[k]
        diagonal.append(dN[i, i] - rhs)
        diagonal_terms.extend((dN[i, i], rhs))
    return [
        _report("frame.off_diagonal", off_diagonal, grid, terms=off_terms),
        _report("frame.diagonal", diagonal, grid, terms=diagonal_terms),
    ]


def check_gauss_equation(system: OrthogonalSystem, order: int | None = None) -> ResidualReport:
    """
    Residual of d_i^2 f = d_i H_i N_i - H_i (beta_ji N_j + beta_ki N_k).
    """
    grid, N, beta, H = system.grid, system.N, system.beta, system.H
    dH = system.lame_gradient(order)
    residuals, terms = [], []
    for i in range(3):
        j, k = [m for m in range(3) if m != i]
        second = _derivative(_derivative(system.f, grid, i, order), grid, i, order)
        rhs = dH[i, i] * N[i] - H[i] * (beta[j, i] * N[j] + beta[k, i] * N[k])
        residuals.append(second - rhs)
        terms.extend((second, rhs))
    return _report("gauss_equation", residuals, grid, terms=terms)


def _lame_reports(
    grid: GridSpec, H: np.ndarray, dH: np.ndarray, order: int | None = None
) -> tuple[ResidualReport, ResidualReport]:
    mask = nonvanishing(H)
    safe = np.where(mask, H, 1.0)
    first, first_terms, second, second_terms = [], [], [], []
    for i, j in PAIRS:
        k = third_index(i, j)
        mixed = _derivative(dH[i, k], grid, j, order)
        left = dH[j, i] / safe[i] * dH[i, k]
        right = dH[i, j] / safe[j] * dH[j, k]
        first.append(mixed - left - right)
        first_terms.extend((mixed, left, right))

        beta_ki = dH[k, i] / safe[k]
        beta_kj = dH[k, j] / safe[k]
        product = beta_ki * beta_kj
        d_beta_ji = _derivative(dH[j, i] / safe[j], grid, j, order)
        d_beta_ij = _derivative(dH[i, j] / safe[i], grid, i, order)
        second.append(product + d_beta_ji + d_beta_ij)
        second_terms.extend((product, d_beta_ji, d_beta_ij))
    return (
        _report("lame.first", first, grid, terms=first_terms, mask=mask),
        _report("lame.second", second, grid, terms=second_terms, mask=mask),
    )


def check_lame(system: OrthogonalSystem, order: int | None = None) -> tuple[ResidualReport, ResidualReport]:
    """
    Residuals of Lame's first system
        d_ij H_k - (d_j H_i / H_i) d_i H_k - (d_i H_j / H_j) d_j H_k
    and second system
        (1/H_k^2) d_k H_i d_k H_j + d_j((1/H_j) d_j H_i) + d_i((1/H_i) d_i H_j)
    over the three index cycles. Nodes with vanishing H are masked.

    Returns:
        tuple: (first, second) ResidualReports.
    """
    return _lame_reports(system.grid, system.H, system.lame_gradient(order), order)


def check_lame_beta(system: OrthogonalSystem, order: int | None = None) -> tuple[ResidualReport, ResidualReport]:
    """
    Lame's equations in terms of the rotational coefficients of the system:
    d_k beta_ij - beta_ik beta_kj = 0 (distinct i, j, k) and
    d_i beta_ij + d_j beta_ji + beta_ki beta_kj = 0.
    """
    grid, beta = system.grid, system.beta
    first, first_terms, second, second_terms = [], [], [], []
    for i in range(3):
        for j in range(3):
            if i == j:
                continue
            k = third_index(i, j)
            derivative = _derivative(beta[i, j], grid, k, order)
            product = beta[i, k] * beta[k, j]
            first.append(derivative - product)
            first_terms.extend((derivative, product))
    for i, j in PAIRS:
        k = third_index(i, j)
        d_ij = _derivative(beta[i, j], grid, i, order)
        d_ji = _derivative(beta[j, i], grid, j, order)
        product = beta[k, i] * beta[k, j]
        second.append(d_ij + d_ji + product)
        second_terms.extend((d_ij, d_ji, product))
    return (
        _report("lame_beta.first", first, grid, terms=first_terms),
        _report("lame_beta.second", second, grid, terms=second_terms),
    )


def check_point_equation(
    system: OrthogonalSystem, pair: tuple[int, int], theta=None, order: int | None = None
) -> ResidualReport:
    """
    Residual of the point equation of the coordinate pair (i, j), i != j in 1..3,

        d_ij theta = d_j ln H_i d_i theta + d_i ln H_j d_j theta,

    for theta = f (default) or any scalar (or stacked) field on the grid.
    """
    i, j = pair[0] - 1, pair[1] - 1
    if i == j or not {i, j} <= {0, 1, 2}:
        raise ValueError(f"Invalid coordinate pair {pair}")
    grid, H = system.grid, system.H
    theta = system.f if theta is None else np.asarray(theta, dtype=float)
    dH = system.lame_gradient(order)
    mask = nonvanishing(H[[i, j]])
    safe = np.where(mask, H, 1.0)

    d_i = _derivative(theta, grid, i, order)
    d_j = _derivative(theta, grid, j, order)
    mixed = _derivative(d_i, grid, j, order)
    left = dH[j, i] / safe[i] * d_i
    right = dH[i, j] / safe[j] * d_j
    return _report(
        f"point_equation.{pair[0]}{pair[1]}",
        [mixed - left - right],
        grid,
        terms=[mixed, left, right],
        mask=mask,
    )


def chi_trace(system: OrthogonalSystem) -> ScalarField:
    """
    Returns the Minkowski trace chi = H1^2 + H2^2 - H3^2.
    """
    return ScalarField(system.grid, np.einsum("i,i...->...", EPSILON, system.H**2))


@dataclass(frozen=True)
class ChiClassification:
    """
    Result of classify_chi. `kind` is one of "guichard", "constant", "alpha_squared", "other";
    `constant` holds chi for constant systems and alpha^2 for alpha^2 |f|^2-systems.
    """

    kind: str
    constant: float | None
    reports: tuple[ResidualReport, ...]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "constant": self.constant,
            "reports": [report.to_dict() for report in self.reports],
        }


def _interior_mean(values: np.ndarray, collar: int) -> float:
    if collar > 0 and all(n > 2 * collar for n in values.shape):
        values = values[tuple(slice(collar, n - collar) for n in values.shape)]
    return float(np.mean(values))


def classify_chi(system: OrthogonalSystem) -> ChiClassification:
    """
    Classifies a system by its trace: Guichard net (chi = 0), constant chi, alpha^2 |f|^2-system
    (chi / |f|^2 constant and positive) or other. Tests are run in that order; tolerances use
    the scale of H^2.
    """
    grid = system.grid
    chi = chi_trace(system).values
    squares = system.H**2
    collar = current_policy().collar

    guichard = _report("chi.guichard", [chi], grid, terms=[squares])
    if guichard.passed:
        return ChiClassification("guichard", 0.0, (guichard,))

    constant = _interior_mean(chi, collar)
    flat = _report(
        "chi.constant", [chi - constant], grid, terms=[squares], details={"chi": constant}
    )
    if flat.passed:
        return ChiClassification("constant", constant, (guichard, flat))

    radius = np.sum(system.f**2, axis=0)
    mask = nonvanishing(radius)
    ratio = np.where(mask, chi / np.where(mask, radius, 1.0), 0.0)
    alpha_squared = _interior_mean(ratio, collar)
    scaled = _report(
        "chi.alpha_squared",
        [chi - alpha_squared * radius],
        grid,
        terms=[squares],
        mask=mask,
        details={"alpha_squared": alpha_squared},
    )
    if scaled.passed and alpha_squared > 0:
        return ChiClassification("alpha_squared", alpha_squared, (guichard, flat, scaled))
    return ChiClassification("other", None, (guichard, flat, scaled))


def induced_metric(system: OrthogonalSystem) -> np.ndarray:
    """
    Returns the diagonal metric coefficients H_i^2, the Euclidean-motion invariant of a system.
    """
    return system.H**2


def compare_metrics(
    first: OrthogonalSystem, second: OrthogonalSystem, name: str = "metric_match"
) -> ResidualReport:
    """
    Compares two systems on one grid up to Euclidean motions (via H_i^2).
    """
    a, b = induced_metric(first), induced_metric(second)
    return _report(name, [a - b], first.grid, terms=[a, b])


def invert_system(system: OrthogonalSystem) -> OrthogonalSystem:
    """
    Applies the inversion f -> f/|f|^2 at the unit sphere.

    H'_i = H_i/|f|^2 keeps the sign of H; the normals are reflected,
    N'_i = (I - 2uu^T) N_i with u = f/|f|, so the frame orientation flips;
    beta'_ij = beta_ij - 2 H_j (f.N_i)/|f|^2.
    """
    radius = np.sum(system.f**2, axis=0)
    require_nonvanishing(radius, "|f|^2")
    unit = system.f / np.sqrt(radius)
    projections = np.einsum("a...,ia...->i...", system.f, system.N)

    N = system.N - 2.0 * np.einsum("a...,ia...->i...", unit, system.N)[:, None] * unit[None]
    beta = system.beta - 2.0 * system.H[None, :] * projections[:, None] / radius
    for i in range(3):
        beta[i, i] = 0.0
    dH = None
    if system.dH is not None:
        dH = (
            system.dH / radius
            - 2.0 * system.H[None, :] * (system.H * projections)[:, None] / radius**2
        )

    logger.info("Inverted system %s", system.provenance.get("chart", system.provenance))
    return OrthogonalSystem(
        grid=system.grid,
        f=system.f / radius,
        H=system.H / radius,
        N=N,
        beta=beta,
        dH=dH,
        provenance={"transform": "inversion", "parent": system.provenance},
        degenerate=system.degenerate,
    )


def _seed_frame(seed_frame) -> np.ndarray:
    seed = np.asarray(seed_frame, dtype=float)
    if seed.shape != (3, 3):
        raise PreconditionError(f"Seed frame must be 3x3, got {seed.shape}")
    defect = float(orthonormality_defect(seed))
    if defect > 1e-10:
        raise PreconditionError(f"Seed frame is not orthonormal (defect {defect:.3e})")
    if np.linalg.det(seed) < 0:
        raise PreconditionError("Seed frame must be right-handed")
    return seed


def integrate_frame(
    H: VectorField,
    seed_frame=np.eye(3),
    base_node: Sequence[int] = (0, 0, 0),
    base_point: Sequence[float] = (0.0, 0.0, 0.0),
    dH: np.ndarray | None = None,
    order: int | None = None,
    project: bool = True,
) -> OrthogonalSystem:
    """
    Reconstructs a system from its Lame coefficients.

    The frame system d_a N_i is marched with RK4 along lattice lines (x, then y, then z)
    from the seed frame, optionally re-orthonormalized after every step, then f is
    integrated from df = sum_i H_i N_i dx_i. The diagnostics carry
    - frame.path_dependence: mismatch against marching z, then y, then x (Lame violation),
    - frame.drift: orthonormality defect before projection,
    - frame.metric: |d_i f| against H_i,
    - lame.first / lame.second of the input.

    Args:
        H (VectorField): Lame coefficients.
        seed_frame: 3x3 right-handed orthonormal matrix, rows N_i at the base node.
        base_node: lattice node of the seed.
        base_point: value of f at the base node.
        dH: exact gradients dH[i, j] = d_i H_j, finite differences when omitted.
        order (int, optional): finite-difference order.
        project (bool): re-orthonormalize after every step.

    Returns:
        OrthogonalSystem: the reconstructed system, unique up to Euclidean motions.
    """
    grid = H.grid
    base_node = check_node(grid, base_node)
    seed = _seed_frame(seed_frame)
    lame = H.values
    gradient = lattice_gradient(lame, grid.spacing, order) if dH is None else np.asarray(dH)
    beta = beta_from_lame(lame, gradient)
    generators = frame_generators(beta)

    forward = march_lattice(generators, seed, grid.spacing, base_node, DEFAULT_ORDER, project)
    backward = march_lattice(generators, seed, grid.spacing, base_node, REVERSED_ORDER, project)
    N = forward.values

    f = integrate_gradient(lame[:, None] * N, grid.spacing, base_node, np.asarray(base_point, dtype=float))
    recovered = np.linalg.norm(lattice_gradient(f, grid.spacing, order), axis=1)

    reports = [
        _report("frame.path_dependence", [N - backward.values], grid, scale=1.0),
        _report("frame.drift", [forward.drift], grid, scale=1.0, collar=0),
        _report("frame.metric", [recovered - np.abs(lame)], grid, terms=[lame]),
        *_lame_reports(grid, lame, gradient, order),
    ]
    for report in reports:
        if not report.passed:
            logger.warning(
                "integrate_frame: %s = %.3e above tolerance %.3e (worst node %s)",
                report.name,
                report.sup,
                report.tolerance,
                report.worst_node,
            )
    system = OrthogonalSystem(
        grid=grid,
        f=f,
        H=lame,
        N=N,
        beta=beta,
        dH=None if dH is None else gradient,
        provenance={"construction": "integrate_frame", "base_node": list(base_node)},
    )
    logger.info("Integrated frame on grid %s", grid.counts)
    return system.with_diagnostics(reports)


def export_slice_obj(system: OrthogonalSystem, axis: int, index: int, path: str) -> str:
    """
    Writes the coordinate surface x_axis = const at lattice `index` as a triangulated OBJ file.
    """
    return write_obj(path, lattice_slice(system.f, axis, index))
