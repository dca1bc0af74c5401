"""
Ribaucour transformations of triply orthogonal systems.

A Ribaucour transform of f is described by four functions: gamma_1, gamma_2, gamma_3 and phi with

    d_i gamma_j = beta_ji gamma_i  (i != j),    d_i phi = H_i gamma_i.

With A = |gamma|^2, theta_i = d_i gamma_i + beta_ji gamma_j + beta_ki gamma_k and
f_bar = sum_i gamma_i N_i, the transform is

    f' = f - (2 phi / A) f_bar,  H'_i = H_i - 2 phi theta_i / A,  beta'_ij = beta_ij - 2 gamma_i theta_j / A.

It decomposes into the Combescure transform f -> f_bar (Lame coefficients theta_i), the inversion
f_bar -> f_bar/|f_bar|^2 and a Combescure transform back onto f'.

For Guichard nets, Bianchi's linear system produces Combescure transforms f_bar with
H_bar_1^2 + H_bar_2^2 - H_bar_3^2 = alpha^2 |f_bar|^2, which drive a Backlund-type transform
preserving the Guichard condition.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from combescure import check_shared_beta
from config import EPSILON
from exceptions.error import IntegrabilityError, PreconditionError
from grid import check_node, closedness_report, integrate_gradient, lattice_gradient
from guichard import check_gsystem_relation, check_guichard
from integrators import DEFAULT_ORDER, REVERSED_ORDER, march_lattice
from logger import get_logger
from residuals import (
    ResidualReport,
    current_policy,
    exceeds_gate,
    field_scale,
    nonvanishing,
    residual_report,
)
from tos_core import OrthogonalSystem, chi_trace, classify_chi, invert_system, require_nonvanishing

logger = get_logger(__name__)

_EPS = np.asarray(EPSILON)
SEED_CONSTRAINT_TOLERANCE = 1e-10


def _report(name, residuals, system: OrthogonalSystem, **kwargs) -> ResidualReport:
    grid = system.grid
    return residual_report(name, residuals, spacing=grid.spacing, grid_summary=grid.summary(), **kwargs)


def _assemble(coefficients: np.ndarray, N: np.ndarray) -> np.ndarray:
    """
    Returns sum_i coefficients_i N_i.
    """
    return np.einsum("i...,ia...->a...", coefficients, N)


@dataclass(frozen=True)
class RibaucourData:
    """
    gamma (3, n1, n2, n3) and phi (n1, n2, n3) of a Ribaucour transform. `gradient[i, j]`
    optionally holds exact derivatives d_i gamma_j.
    """

    gamma: np.ndarray
    phi: np.ndarray
    gradient: np.ndarray | None = None

    @property
    def A(self) -> np.ndarray:
        return np.sum(self.gamma**2, axis=0)

    def derivatives(self, spacing: Sequence[float], order: int | None = None) -> np.ndarray:
        if self.gradient is not None:
            return self.gradient
        return lattice_gradient(self.gamma, spacing, order)

    def theta(self, system: OrthogonalSystem, order: int | None = None) -> np.ndarray:
        """
        Returns theta_i = d_i gamma_i + sum_m beta_mi gamma_m, the Lame coefficients of f_bar.
        """
        dgamma = self.derivatives(system.grid.spacing, order)
        diagonal = np.stack([dgamma[i, i] for i in range(3)])
        return diagonal + np.einsum("mi...,m...->i...", system.beta, self.gamma)

    def shifted(self, value: float) -> RibaucourData:
        """
        Returns the data with phi + value, another member of the induced family.
        """
        return RibaucourData(self.gamma, self.phi + value, self.gradient)


def projected_data(system: OrthogonalSystem, bar: OrthogonalSystem, phi: np.ndarray) -> RibaucourData:
    """
    Ribaucour data gamma_i = f_bar . N_i of a Combescure transform `bar` of `system`, with the
    exact gradient d_i gamma_j = beta_ji gamma_i and d_i gamma_i = H_bar_i - sum_m beta_mi gamma_m.
    """
    gamma = np.einsum("a...,ia...->i...", bar.f, system.N)
    beta = system.beta
    gradient = np.empty((3, 3) + gamma.shape[1:])
    for i in range(3):
        for j in range(3):
            if i != j:
                gradient[i, j] = beta[j, i] * gamma[i]
        gradient[i, i] = bar.H[i] - np.einsum("m...,m...->...", beta[:, i], gamma)
    return RibaucourData(gamma, phi, gradient)


def check_ribaucour_data(
    system: OrthogonalSystem, data: RibaucourData, order: int | None = None
) -> ResidualReport:
    """
    Residual of d_i gamma_j - beta_ji gamma_i (i != j) and d_i phi - H_i gamma_i.
    The sup of each family is listed under details.
    """
    grid = system.grid
    dgamma = data.derivatives(grid.spacing, order)
    dphi = lattice_gradient(data.phi, grid.spacing, order)
    gamma_residuals, gamma_terms = [], []
    for i in range(3):
        for j in range(3):
            if i != j:
                rhs = system.beta[j, i] * data.gamma[i]
                gamma_residuals.append(dgamma[i, j] - rhs)
                gamma_terms.extend((dgamma[i, j], rhs))
    phi_rhs = system.H * data.gamma
    phi_residual = dphi - phi_rhs

    gamma_part = _report("ribaucour_data.gamma", gamma_residuals, system, terms=gamma_terms)
    phi_part = _report("ribaucour_data.phi", [phi_residual], system, terms=[dphi, phi_rhs])
    return _report(
        "ribaucour_data",
        gamma_residuals + [phi_residual],
        system,
        terms=gamma_terms + [dphi, phi_rhs],
        details={"gamma": gamma_part.sup, "phi": phi_part.sup},
    )


def sphere_radii(data: RibaucourData) -> tuple[np.ndarray, np.ndarray]:
    """
    Radii R_i = -phi / gamma_i of the enveloped sphere congruences, NaN where gamma_i vanishes.

    Returns:
        tuple: radii (3, n1, n2, n3) and the boolean mask of the valid entries.
    """
    threshold = current_policy().mask_threshold * (field_scale(data.gamma) or 1.0)
    mask = np.abs(data.gamma) > threshold
    radii = np.full(data.gamma.shape, np.nan)
    np.divide(-data.phi[None], data.gamma, out=radii, where=mask)
    return radii, mask


def _transform_fields(system: OrthogonalSystem, data: RibaucourData, theta: np.ndarray):
    A = data.A
    require_nonvanishing(A, "A = |gamma|^2")
    bar = _assemble(data.gamma, system.N)
    weight = 2.0 * data.phi / A
    f = system.f - weight[None] * bar
    H = system.H - weight[None] * theta
    N = system.N - 2.0 * data.gamma[:, None] * bar[None] / A
    beta = system.beta - 2.0 * data.gamma[:, None] * theta[None] / A
    for i in range(3):
        beta[i, i] = 0.0
    return f, H, N, beta


def _beta_report(transformed: OrthogonalSystem, order: int | None = None) -> ResidualReport:
    """
    Residual of d_i H'_j - beta'_ij H'_i (i != j) with finite differences of H'.
    """
    dH = lattice_gradient(transformed.H, transformed.grid.spacing, order)
    residuals, terms = [], []
    for i in range(3):
        for j in range(3):
            if i != j:
                rhs = transformed.beta[i, j] * transformed.H[i]
                residuals.append(dH[i, j] - rhs)
                terms.extend((dH[i, j], rhs))
    return _report("ribaucour.beta", residuals, transformed, terms=terms)


def _ribaucour_image(
    system: OrthogonalSystem, data: RibaucourData, provenance: dict, order: int | None = None
) -> OrthogonalSystem:
    theta = data.theta(system, order)
    f, H, N, beta = _transform_fields(system, data, theta)
    degenerate = system.degenerate or not bool(nonvanishing(H).all())
    if degenerate:
        logger.warning("Ribaucour image has vanishing Lame coefficients, output flagged degenerate")
    transformed = OrthogonalSystem(
        grid=system.grid,
        f=f,
        H=H,
        N=N,
        beta=beta,
        provenance={**provenance, "parent": system.provenance},
        degenerate=degenerate,
    )
    return transformed.with_diagnostics([_beta_report(transformed, order)])


def apply_ribaucour(
    system: OrthogonalSystem, data: RibaucourData, order: int | None = None
) -> OrthogonalSystem:
    """
    Applies the Ribaucour transform given by `data`.

    Returns:
        OrthogonalSystem: f', H', N'_i = N_i - 2 gamma_i f_bar / A and beta'. Diagnostics carry
        the data check and the agreement of beta' with finite differences of H'.

    Raises:
        PreconditionError: if the data conditions fail beyond the gate tolerance.
        DegenerateSystemError: if A vanishes at some node.
    """
    check = check_ribaucour_data(system, data, order)
    if exceeds_gate(check):
        raise PreconditionError("Ribaucour data violate their linear system", failures=[check.name])
    transformed = _ribaucour_image(system, data, {"transform": "ribaucour"}, order)
    logger.info("Applied Ribaucour transform on grid %s", system.grid.counts)
    return transformed.with_diagnostics([check])


def check_sphere_congruence(
    system: OrthogonalSystem, data: RibaucourData, transformed: OrthogonalSystem
) -> tuple[ResidualReport, ...]:
    """
    Checks that f' = f - (2 phi/A) f_bar, that f' - f is collinear with f_bar, and that every
    sphere with center f + R_i N_i and radius R_i passes through f'.
    """
    bar = _assemble(data.gamma, system.N)
    expected = system.f - (2.0 * data.phi / data.A)[None] * bar
    construction = _report(
        "sphere_congruence.construction",
        [transformed.f - expected],
        system,
        terms=[transformed.f, expected],
    )
    displacement = transformed.f - system.f
    cross = np.cross(displacement, bar, axis=0)
    collinear = _report(
        "sphere_congruence.collinear",
        [cross],
        system,
        terms=[np.linalg.norm(displacement, axis=0) * np.linalg.norm(bar, axis=0)],
    )
    radii, mask = sphere_radii(data)
    residuals = []
    for i in range(3):
        safe = np.where(mask[i], radii[i], 0.0)
        offset = transformed.f - system.f - safe[None] * system.N[i]
        residuals.append(np.where(mask[i], np.sum(offset**2, axis=0) - safe**2, 0.0))
    spheres = _report(
        "sphere_congruence.spheres",
        residuals,
        system,
        terms=[np.where(mask, radii, 0.0) ** 2],
    )
    return construction, collinear, spheres


@dataclass(frozen=True)
class RibaucourDecomposition:
    """
    The pieces of a Ribaucour transform: the Combescure transform `bar` (f_bar, Lame theta_i),
    its inversion image, the inversion data phi_bar = (A - 1)/2, the transform itself and
    the reconstruction f - 2 phi f_bar'.
    """

    bar: OrthogonalSystem
    inverted: OrthogonalSystem
    inversion_phi: np.ndarray
    transformed: OrthogonalSystem
    reconstruction: np.ndarray
    reports: tuple[ResidualReport, ...] = field(default_factory=tuple)


def decompose_ribaucour(
    system: OrthogonalSystem, data: RibaucourData, order: int | None = None
) -> RibaucourDecomposition:
    """
    Decomposes a Ribaucour transform into Combescure, inversion and Combescure.

    Reports:
        decomposition.bar_lame: |d_i f_bar| against |theta_i|.
        decomposition.combescure: d_j(theta_i / A) - beta'_ji theta_j / A for i != j.
        decomposition.reconstruction: f - 2 phi f_bar' against the transform.

    Raises:
        DegenerateSystemError: if |f_bar|^2 vanishes at some node.
    """
    grid = system.grid
    theta = data.theta(system, order)
    bar = OrthogonalSystem(
        grid=grid,
        f=_assemble(data.gamma, system.N),
        H=theta,
        N=system.N,
        beta=system.beta,
        provenance={"construction": "ribaucour_bar", "parent": system.provenance},
        degenerate=not bool(nonvanishing(theta).all()),
    )
    inverted = invert_system(bar)
    transformed = apply_ribaucour(system, data, order)
    reconstruction = system.f - 2.0 * data.phi[None] * inverted.f

    tangents = lattice_gradient(bar.f, grid.spacing, order)
    recovered = np.linalg.norm(tangents, axis=1)
    bar_lame = _report(
        "decomposition.bar_lame", [recovered - np.abs(theta)], system, terms=[recovered, theta]
    )

    scaled = theta / data.A
    dscaled = lattice_gradient(scaled, grid.spacing, order)
    residuals, terms = [], []
    for i in range(3):
        for j in range(3):
            if i != j:
                rhs = transformed.beta[j, i] * scaled[j]
                residuals.append(dscaled[j, i] - rhs)
                terms.extend((dscaled[j, i], rhs))
    combescure = _report("decomposition.combescure", residuals, system, terms=terms)
    rebuilt = _report(
        "decomposition.reconstruction",
        [reconstruction - transformed.f],
        system,
        terms=[reconstruction, transformed.f],
        collar=0,
    )
    return RibaucourDecomposition(
        bar=bar,
        inverted=inverted,
        inversion_phi=0.5 * (data.A - 1.0),
        transformed=transformed,
        reconstruction=reconstruction,
        reports=(bar_lame, combescure, rebuilt),
    )


def induce_ribaucour_family(
    system: OrthogonalSystem,
    comb_system: OrthogonalSystem,
    lam: float = 0.0,
    base_node: Sequence[int] = (0, 0, 0),
) -> RibaucourData:
    """
    Ribaucour data induced by a Combescure transform f_bar of `system`: gamma_i = f_bar . N_i and
    phi from d_i phi = H_i gamma_i, anchored as phi = f . f_bar / 2 + lam at `base_node`.

    Raises:
        PreconditionError: if the two systems do not share their rotational coefficients.
        IntegrabilityError: if the gradient of phi is not closed.
    """
    base_node = check_node(system.grid, base_node)
    shared = check_shared_beta(system, comb_system)
    if exceeds_gate(shared):
        raise PreconditionError("Systems are not Combescure related", failures=[shared.name])

    data = projected_data(system, comb_system, np.zeros(system.H.shape[1:]))
    integrand = system.H * data.gamma
    closedness = closedness_report("ribaucour_family.closedness", integrand, system.grid)
    if exceeds_gate(closedness):
        raise IntegrabilityError("Gradient of phi is not closed", report=closedness)
    index = (slice(None),) + base_node
    anchor = 0.5 * float(np.dot(system.f[index], comb_system.f[index])) + lam
    phi = integrate_gradient(integrand, system.grid.spacing, base_node, anchor)
    return RibaucourData(data.gamma, phi, data.gradient)


@dataclass(frozen=True)
class BianchiData:
    """
    Solution (gamma, gamma_bar) of Bianchi's linear system for a Guichard net and alpha.
    theta_i = alpha gamma_bar_i are the Lame coefficients of f_bar = sum_i gamma_i N_i.
    """

    gamma: np.ndarray
    gammabar: np.ndarray
    alpha: float
    reports: tuple[ResidualReport, ...] = field(default_factory=tuple)

    @property
    def A(self) -> np.ndarray:
        return np.sum(self.gamma**2, axis=0)

    @property
    def Abar(self) -> np.ndarray:
        return np.einsum("i,i...->...", _EPS, self.gammabar**2)

    @property
    def theta(self) -> np.ndarray:
        return self.alpha * self.gammabar

    @property
    def theta_bar(self) -> np.ndarray:
        return self.alpha * self.gamma

    def gamma_gradient(self, system: OrthogonalSystem) -> np.ndarray:
        """
        Exact d_i gamma_j from the system: beta_ji gamma_i off the diagonal,
        alpha gamma_bar_i - sum_m beta_mi gamma_m on it.
        """
        beta = system.beta
        gradient = np.empty((3, 3) + self.gamma.shape[1:])
        for i in range(3):
            for j in range(3):
                if i != j:
                    gradient[i, j] = beta[j, i] * self.gamma[i]
            gradient[i, i] = self.theta[i] - np.einsum("m...,m...->...", beta[:, i], self.gamma)
        return gradient

    def ribaucour_data(self, system: OrthogonalSystem, lam: float = 0.0) -> RibaucourData:
        """
        The Ribaucour data (gamma, phi + lam) of the Backlund transform driven by this solution.
        """
        return RibaucourData(self.gamma, bianchi_phi(system, self) + lam, self.gamma_gradient(system))


def bianchi_generators(beta: np.ndarray, alpha: float) -> np.ndarray:
    """
    Generators M_a (3, 6, 6, n1, n2, n3) of Bianchi's system for U = (gamma, gamma_bar):

        d_a gamma_m = beta_ma gamma_a,               d_a gamma_a = alpha gamma_bar_a - sum_m beta_ma gamma_m,
        d_a gamma_bar_m = beta_am gamma_bar_a,       d_a gamma_bar_a = eps_a (alpha gamma_a - sum_m eps_m beta_am gamma_bar_m),

    with m running over the two indices other than a.
    """
    generators = np.zeros((3, 6, 6) + beta.shape[2:])
    for a in range(3):
        generators[a, a, 3 + a] = alpha
        generators[a, 3 + a, a] = _EPS[a] * alpha
        for m in range(3):
            if m == a:
                continue
            generators[a, m, a] = beta[m, a]
            generators[a, a, m] = -beta[m, a]
            generators[a, 3 + m, 3 + a] = beta[a, m]
            generators[a, 3 + a, 3 + m] = -_EPS[a] * _EPS[m] * beta[a, m]
    return generators


def _alpha_trace_report(bar: OrthogonalSystem, alpha: float, name: str) -> ResidualReport:
    trace = chi_trace(bar).values
    target = alpha**2 * np.sum(bar.f**2, axis=0)
    return _report(name, [trace - target], bar, terms=[bar.H**2, target], pointwise=True)


def integrate_bianchi(
    system: OrthogonalSystem,
    alpha: float,
    gamma_seed: Sequence[float],
    gammabar_seed: Sequence[float],
    base_node: Sequence[int] = (0, 0, 0),
) -> tuple[BianchiData, OrthogonalSystem]:
    """
    Integrates Bianchi's system from (gamma, gamma_bar) at `base_node` along lattice lines
    (x, then y, then z) and assembles the alpha^2 |f_bar|^2-system f_bar = sum_i gamma_i N_i.

    Reports attached to the result:
        bianchi.path_dependence: mismatch against marching z, then y, then x.
        bianchi.constraint: drift of A - A_bar, conserved by the exact flow.
        bianchi.alpha_trace: theta_1^2 + theta_2^2 - theta_3^2 - alpha^2 |f_bar|^2.

    Raises:
        PreconditionError: if alpha vanishes, the seed violates A = A_bar > 0 or the
            system is not a Guichard net.
        IntegrabilityError: if the path dependence exceeds the gate tolerance.
    """
    if alpha == 0:
        raise PreconditionError("alpha must not vanish", failures=["alpha"])
    grid = system.grid
    base_node = check_node(grid, base_node)
    gamma0 = np.asarray(gamma_seed, dtype=float)
    gammabar0 = np.asarray(gammabar_seed, dtype=float)
    if gamma0.shape != (3,) or gammabar0.shape != (3,):
        raise PreconditionError("Bianchi seeds need three components each", failures=["seed"])
    A0 = float(np.sum(gamma0**2))
    Abar0 = float(np.dot(_EPS, gammabar0**2))
    if A0 <= 0 or abs(A0 - Abar0) > SEED_CONSTRAINT_TOLERANCE * max(1.0, A0):
        raise PreconditionError(
            f"Bianchi seed violates A = A_bar > 0 (A = {A0}, A_bar = {Abar0})", failures=["seed_constraint"]
        )
    failures = [report.name for report in check_guichard(system) if exceeds_gate(report)]
    if failures:
        raise PreconditionError("Bianchi's system needs a Guichard net", failures=failures)

    generators = bianchi_generators(system.beta, alpha)
    initial = np.concatenate((gamma0, gammabar0))
    forward = march_lattice(generators, initial, grid.spacing, base_node, DEFAULT_ORDER)
    backward = march_lattice(generators, initial, grid.spacing, base_node, REVERSED_ORDER)
    values = forward.values[:, 0]
    path = _report(
        "bianchi.path_dependence",
        [values - backward.values[:, 0]],
        system,
        terms=[values],
    )
    if exceeds_gate(path):
        raise IntegrabilityError(
            "Bianchi integration is path dependent; the input is not a Guichard net or the grid is too coarse",
            report=path,
        )

    data = BianchiData(values[:3], values[3:], float(alpha))
    constraint = _report(
        "bianchi.constraint", [data.A - data.Abar - (A0 - Abar0)], system, terms=[data.A], collar=0
    )

    theta = data.theta
    dH = np.empty((3, 3) + theta.shape[1:])
    for i in range(3):
        for j in range(3):
            if i != j:
                dH[i, j] = system.beta[i, j] * theta[i]
        coupling = np.einsum("m,m...,m...->...", _EPS, system.beta[i], data.gammabar)
        dH[i, i] = alpha * _EPS[i] * (alpha * data.gamma[i] - coupling)
    bar = OrthogonalSystem(
        grid=grid,
        f=_assemble(data.gamma, system.N),
        H=theta,
        N=system.N,
        beta=system.beta,
        dH=dH,
        provenance={
            "construction": "bianchi",
            "alpha": float(alpha),
            "gamma_seed": gamma0.tolist(),
            "gammabar_seed": gammabar0.tolist(),
            "base_node": list(base_node),
            "parent": system.provenance,
        },
        degenerate=not bool(nonvanishing(theta).all()),
    )
    trace = _alpha_trace_report(bar, alpha, "bianchi.alpha_trace")
    reports = (path, constraint, trace)
    logger.info("Integrated Bianchi data (alpha=%s) on grid %s", alpha, grid.counts)
    return BianchiData(data.gamma, data.gammabar, data.alpha, reports), bar.with_diagnostics(reports)


def bianchi_phi(system: OrthogonalSystem, data: BianchiData) -> np.ndarray:
    """
    Returns phi = (1/alpha) sum_i eps_i H_i gamma_bar_i, which solves d_i phi = H_i gamma_i.
    """
    return np.einsum("i,i...->...", _EPS, system.H * data.gammabar) / data.alpha


def _backlund_phi(system: OrthogonalSystem, bar: OrthogonalSystem, alpha: float) -> np.ndarray:
    return np.einsum("i,i...->...", _EPS, system.H * bar.H) / alpha**2


def _backlund_preconditions(system: OrthogonalSystem, bar: OrthogonalSystem, alpha: float) -> list[str]:
    if alpha == 0:
        return ["alpha"]
    failures = []
    shared = check_shared_beta(system, bar, name="backlund.shared_beta")
    if exceeds_gate(shared):
        failures.append(shared.name)
    trace = _alpha_trace_report(bar, alpha, "backlund.alpha_trace")
    if exceeds_gate(trace):
        failures.append(trace.name)
    return failures


def _backlund_image(
    system: OrthogonalSystem, bar: OrthogonalSystem, alpha: float, lam: float, provenance: dict
) -> tuple[OrthogonalSystem, np.ndarray]:
    require_nonvanishing(np.sum(bar.f**2, axis=0), "|f_bar|^2")
    phi = _backlund_phi(system, bar, alpha) + lam
    data = projected_data(system, bar, phi)
    return _ribaucour_image(system, data, provenance), phi


def backlund(
    system: OrthogonalSystem, bar: OrthogonalSystem, alpha: float, lam: float = 0.0
) -> OrthogonalSystem:
    """
    Backlund-type transform of a Guichard net by an alpha^2 |f_bar|^2-system f_bar:

        R(f) = f - (2 phi / |f_bar|^2) f_bar,  R(H_i) = H_i - (2 phi / |f_bar|^2) H_bar_i,

    with phi = (1/alpha^2)(H_1 H_bar_1 + H_2 H_bar_2 - H_3 H_bar_3) + lam. The result is a Guichard
    net iff lam = 0; otherwise its trace is 4 alpha^2 lam phi / |f_bar|^2, reported as
    "backlund.trace".

    Raises:
        PreconditionError: if f_bar is not a Combescure transform of the net or its trace
            differs from alpha^2 |f_bar|^2.
        DegenerateSystemError: if |f_bar|^2 vanishes at some node.
    """
    failures = _backlund_preconditions(system, bar, alpha)
    if failures:
        raise PreconditionError("Backlund transform preconditions violated", failures=failures)
    transformed, phi = _backlund_image(
        system, bar, alpha, lam, {"transform": "backlund", "alpha": float(alpha), "lambda": float(lam)}
    )
    radius = np.sum(bar.f**2, axis=0)
    expected = 4.0 * alpha**2 * lam * phi / radius
    trace = chi_trace(transformed).values
    report = _report("backlund.trace", [trace - expected], transformed, terms=[transformed.H**2, expected])
    reports = [report]
    if lam == 0:
        reports.extend(check_guichard(transformed))
    logger.info("Backlund transform (alpha=%s, lambda=%s) on grid %s", alpha, lam, system.grid.counts)
    return transformed.with_diagnostics(reports)


def backlund_lambda_system(system: OrthogonalSystem, bar: OrthogonalSystem, alpha: float) -> OrthogonalSystem:
    """
    Applies the Backlund formulas with lam = 0 to a system of constant trace chi; the result
    has the same constant trace, reported as "backlund.lambda_trace".

    Raises:
        PreconditionError: if the trace is not constant, the system is degenerate, or f_bar
            fails the Backlund preconditions.
    """
    failures = _backlund_preconditions(system, bar, alpha)
    if system.degenerate or not bool(nonvanishing(system.H).all()):
        failures.append("degenerate_seed")
    classification = classify_chi(system)
    if classification.kind not in ("guichard", "constant"):
        failures.append("constant_trace")
    if failures:
        raise PreconditionError("lambda-system transform preconditions violated", failures=failures)

    transformed, _ = _backlund_image(
        system, bar, alpha, 0.0, {"transform": "backlund_lambda_system", "alpha": float(alpha)}
    )
    constant = classification.constant
    report = _report(
        "backlund.lambda_trace",
        [chi_trace(transformed).values - constant],
        transformed,
        terms=[transformed.H**2],
        details={"lambda": constant},
    )
    return transformed.with_diagnostics([report])


def check_permutability(
    seed: OrthogonalSystem,
    assoc: OrthogonalSystem,
    dual: OrthogonalSystem,
    bar: OrthogonalSystem,
    alpha: float,
) -> tuple[ResidualReport, ...]:
    """
    Checks that the Backlund transforms of a Guichard net, its associated system and its dual
    by one f_bar are again a Guichard net with associated and dual systems. With
    phi = (1/alpha^2) sum eps_i H_i H_bar_i and phi^, phi* built the same way from H^ and H*:

        phi H*_i + phi* H_i + 2 phi^ H^_i = (2/alpha^2) H_bar_i,
        phi phi* + phi^^2 = |f_bar|^2 / alpha^2,
        R(H_i) R(H*_j) + R(H_j) R(H*_i) + 2 R(H^_i) R(H^_j) = 0   (i != j),

    and the three images share their rotational coefficients.

    Raises:
        PreconditionError: listing every failed precondition.
    """
    failures = []
    try:
        relation = check_gsystem_relation(seed, assoc, dual)
        if exceeds_gate(relation):
            failures.append(relation.name)
    except PreconditionError as error:
        failures.extend(error.failures)
    for name, system in (("seed", seed), ("assoc", assoc), ("dual", dual)):
        failures.extend(f"{name}:{failure}" for failure in _backlund_preconditions(system, bar, alpha))
    if failures:
        raise PreconditionError("Permutability preconditions violated", failures=failures)

    phi = _backlund_phi(seed, bar, alpha)
    phi_hat = _backlund_phi(assoc, bar, alpha)
    phi_star = _backlund_phi(dual, bar, alpha)
    radius = np.sum(bar.f**2, axis=0)

    left = phi[None] * dual.H + phi_star[None] * seed.H + 2.0 * phi_hat[None] * assoc.H
    right = 2.0 * bar.H / alpha**2
    linear = _report("permutability.phi_linear", [left - right], seed, terms=[left, right])
    product = phi * phi_star + phi_hat**2
    target = radius / alpha**2
    quadratic = _report(
        "permutability.phi_quadratic", [product - target], seed, terms=[phi * phi_star, phi_hat**2, target]
    )

    images = {
        "seed": _backlund_image(seed, bar, alpha, 0.0, {"transform": "backlund"})[0],
        "assoc": _backlund_image(assoc, bar, alpha, 0.0, {"transform": "backlund"})[0],
        "dual": _backlund_image(dual, bar, alpha, 0.0, {"transform": "backlund"})[0],
    }
    H, H_hat, H_star = images["seed"].H, images["assoc"].H, images["dual"].H
    residuals, terms = [], []
    for i in range(3):
        for j in range(i + 1, 3):
            first = H[i] * H_star[j] + H[j] * H_star[i]
            second = 2.0 * H_hat[i] * H_hat[j]
            residuals.append(first + second)
            terms.extend((H[i] * H_star[j], H[j] * H_star[i], second))
    transformed_relation = _report("permutability.relation", residuals, seed, terms=terms)

    shared = (
        check_shared_beta(images["seed"], images["assoc"], "permutability.shared_beta.seed_assoc"),
        check_shared_beta(images["seed"], images["dual"], "permutability.shared_beta.seed_dual"),
    )
    guichard_trace = check_guichard(images["seed"])[0].renamed("permutability.guichard")
    return (linear, quadratic, transformed_relation, *shared, guichard_trace)
