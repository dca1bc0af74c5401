import numpy as np
import pytest

from catalog import instantiate, sample
from combescure import CombescureTriple, apply_combescure
from exceptions.error import PreconditionError
from grid import GridSpec
from guichard import build_associated, build_dual
from ribaucour import (
    apply_ribaucour,
    backlund,
    backlund_lambda_system,
    bianchi_generators,
    bianchi_phi,
    check_permutability,
    check_ribaucour_data,
    check_sphere_congruence,
    decompose_ribaucour,
    induce_ribaucour_family,
    integrate_bianchi,
    projected_data,
    sphere_radii,
)

SQRT2 = np.sqrt(2.0)
ORIGIN = (8, 8, 8)
SEED = ((1.0, 1.0, 0.0), (1.0, 1.0, 0.0))


@pytest.fixture(scope="module")
def flat():
    return sample(instantiate("flat_guichard"), GridSpec.cube(-0.5, 0.5, 17))


@pytest.fixture(scope="module")
def bianchi(flat):
    return integrate_bianchi(flat, 1.0, *SEED, base_node=ORIGIN)


def _at(values, node=ORIGIN):
    return values[(slice(None),) + node]


def test_bianchi_solution_on_flat_coordinates(flat, bianchi):
    """
    With alpha = 1 and seed (1, 1, 0; 1, 1, 0) both gamma and gamma_bar equal (e^x, e^y, 0).
    """
    data, bar = bianchi
    X, Y, _ = flat.grid.mesh()
    expected = np.stack((np.exp(X), np.exp(Y), np.zeros_like(X)))
    np.testing.assert_allclose(data.gamma, expected, atol=1e-6)
    np.testing.assert_allclose(data.gammabar, expected, atol=1e-6)
    np.testing.assert_allclose(bar.f, expected, atol=1e-6)
    assert [report.name for report in data.reports] == [
        "bianchi.path_dependence",
        "bianchi.constraint",
        "bianchi.alpha_trace",
    ]
    assert all(report.passed for report in data.reports)
    assert bar.degenerate
    np.testing.assert_allclose(bianchi_phi(flat, data), np.exp(X) + np.exp(Y), atol=1e-6)


def test_bianchi_generators_layout():
    beta = np.zeros((3, 3, 1))
    beta[0, 1] = 2.0
    generators = bianchi_generators(beta, 3.0)
    assert generators.shape == (3, 6, 6, 1)
    assert generators[2, 2, 5, 0] == 3.0
    assert generators[2, 5, 2, 0] == -3.0
    assert generators[1, 0, 1, 0] == 2.0
    assert generators[1, 1, 0, 0] == -2.0
    assert generators[0, 4, 3, 0] == 2.0
    assert generators[0, 3, 4, 0] == -2.0


def test_integrate_bianchi_preconditions(flat):
    with pytest.raises(PreconditionError) as error:
        integrate_bianchi(flat, 0.0, *SEED)
    assert error.value.failures == ["alpha"]
    with pytest.raises(PreconditionError) as error:
        integrate_bianchi(flat, 1.0, (1.0, 0.0, 0.0), (0.0, 0.0, 0.0))
    assert error.value.failures == ["seed_constraint"]

    chart = instantiate("spherical_control")
    control = sample(chart, GridSpec(chart.lower, chart.upper, (9, 9, 9)))
    with pytest.raises(PreconditionError) as error:
        integrate_bianchi(control, 1.0, *SEED)
    assert "guichard.trace" in error.value.failures


def test_ribaucour_transform_at_the_origin(flat, bianchi):
    """
    f' = (-2, -2, 0) and H' = (-1, -1, sqrt2) at the origin.
    """
    data, _ = bianchi
    ribaucour_data = data.ribaucour_data(flat)
    assert check_ribaucour_data(flat, ribaucour_data).passed
    transformed = apply_ribaucour(flat, ribaucour_data)
    np.testing.assert_allclose(_at(transformed.f), [-2.0, -2.0, 0.0], atol=1e-6)
    np.testing.assert_allclose(_at(transformed.H), [-1.0, -1.0, SQRT2], atol=1e-6)
    assert transformed.diagnostics["ribaucour.beta"].passed
    assert transformed.diagnostics["ribaucour_data"].passed
    assert all(report.passed for report in check_sphere_congruence(flat, ribaucour_data, transformed))


def test_apply_ribaucour_refuses_inconsistent_data(flat, bianchi):
    data, _ = bianchi
    broken = data.ribaucour_data(flat)
    broken = type(broken)(broken.gamma, broken.phi * 3.0, broken.gradient)
    with pytest.raises(PreconditionError) as error:
        apply_ribaucour(flat, broken)
    assert error.value.failures == ["ribaucour_data"]


def test_sphere_radii_mask_vanishing_gamma(flat, bianchi):
    data, _ = bianchi
    radii, mask = sphere_radii(data.ribaucour_data(flat))
    assert not mask[2].any()
    assert np.isnan(radii[2]).all()
    np.testing.assert_allclose(_at(radii)[:2], [-2.0, -2.0], atol=1e-6)


def test_backlund_is_guichard_for_lambda_zero(flat, bianchi):
    _, bar = bianchi
    transformed = backlund(flat, bar, 1.0)
    np.testing.assert_allclose(_at(transformed.H), [-1.0, -1.0, SQRT2], atol=1e-6)
    for name in ("backlund.trace", "guichard.trace", "guichard.differentiated"):
        assert transformed.diagnostics[name].passed, name


def test_backlund_trace_for_nonzero_lambda(flat, bianchi):
    """
    lambda = 1: phi = 3 and R(H) = (-2, -2, sqrt2) at the origin, trace 4 lambda phi / |f_bar|^2 = 6.
    """
    _, bar = bianchi
    transformed = backlund(flat, bar, 1.0, lam=1.0)
    np.testing.assert_allclose(_at(transformed.H), [-2.0, -2.0, SQRT2], atol=1e-6)
    trace = transformed.H[0] ** 2 + transformed.H[1] ** 2 - transformed.H[2] ** 2
    assert _at(trace[None])[0] == pytest.approx(6.0, abs=1e-5)
    assert transformed.diagnostics["backlund.trace"].passed
    assert "guichard.trace" not in transformed.diagnostics


def test_backlund_preconditions(flat, bianchi):
    _, bar = bianchi
    with pytest.raises(PreconditionError) as error:
        backlund(flat, bar, 2.0)
    assert error.value.failures == ["backlund.alpha_trace"]


def test_backlund_lambda_system_keeps_constant_trace(flat, bianchi):
    """
    H = (2, 1, sqrt2) has trace 3, and so has its transform.
    """
    _, bar = bianchi
    scaled = apply_combescure(
        flat, CombescureTriple(np.stack([np.full(flat.grid.shape, v) for v in (2.0, 1.0, 1.0)]), flat)
    )
    transformed = backlund_lambda_system(scaled, bar, 1.0)
    np.testing.assert_allclose(_at(transformed.H), [-1.0, -2.0, SQRT2], atol=1e-6)
    report = transformed.diagnostics["backlund.lambda_trace"]
    assert report.passed
    assert report.details["lambda"] == pytest.approx(3.0)

    X, _, _ = flat.grid.mesh()
    varying = apply_combescure(
        flat, CombescureTriple(np.stack((1.0 + X**2, np.ones_like(X), np.ones_like(X))), flat)
    )
    with pytest.raises(PreconditionError) as error:
        backlund_lambda_system(varying, bar, 1.0)
    assert error.value.failures == ["constant_trace"]


def test_decompose_ribaucour(flat, bianchi):
    data, _ = bianchi
    decomposition = decompose_ribaucour(flat, data.ribaucour_data(flat))
    assert [report.name for report in decomposition.reports] == [
        "decomposition.bar_lame",
        "decomposition.combescure",
        "decomposition.reconstruction",
    ]
    assert all(report.passed for report in decomposition.reports)
    np.testing.assert_allclose(decomposition.reconstruction, decomposition.transformed.f, atol=1e-12)
    assert _at(decomposition.inversion_phi[None])[0] == pytest.approx(0.5, abs=1e-6)


def test_induced_family_is_anchored_at_the_base_node(flat, bianchi):
    """
    phi = f . f_bar / 2 + lambda at the base node; the family differs from the Bianchi phi
    by a constant.
    """
    data, bar = bianchi
    induced = induce_ribaucour_family(flat, bar, 0.25, ORIGIN)
    assert induced.phi[ORIGIN] == pytest.approx(0.25)
    difference = induced.phi - bianchi_phi(flat, data)
    np.testing.assert_allclose(difference, difference[ORIGIN], atol=1e-3)
    assert check_ribaucour_data(flat, induced).passed
    np.testing.assert_allclose(induced.shifted(1.0).phi, induced.phi + 1.0)

    projected = projected_data(flat, bar, induced.phi)
    np.testing.assert_allclose(projected.theta(flat), bar.H, atol=1e-12)


def test_permutability_of_the_flat_gsystem(flat, bianchi):
    """
    At c = 0 the associated and dual systems of flat coordinates have H^ = (1/sqrt2, -1/sqrt2, 0)
    and H* = (1/2, 1/2, -sqrt2/2); their Backlund images again form a G-system.
    """
    _, bar = bianchi
    family, assoc = build_associated(flat, 0.0, ORIGIN)
    dual = build_dual(flat, family, 0.0)
    np.testing.assert_allclose(_at(assoc.H), [1 / SQRT2, -1 / SQRT2, 0.0], atol=1e-12)
    np.testing.assert_allclose(_at(dual.H), [0.5, 0.5, -SQRT2 / 2], atol=1e-12)

    reports = check_permutability(flat, assoc, dual, bar, 1.0)
    assert [report.name for report in reports] == [
        "permutability.phi_linear",
        "permutability.phi_quadratic",
        "permutability.relation",
        "permutability.shared_beta.seed_assoc",
        "permutability.shared_beta.seed_dual",
        "permutability.guichard",
    ]
    failed = [report.name for report in reports if not report.passed]
    assert failed == []


def test_permutability_lists_every_failed_precondition(flat, bianchi):
    _, bar = bianchi
    chart = instantiate("six_sphere")
    other = sample(chart, GridSpec.cube(0.5, 1.5, 17))
    with pytest.raises(PreconditionError) as error:
        check_permutability(flat, flat, other, bar, 1.0)
    assert "shared_beta.dual" in error.value.failures
    assert "dual:backlund.shared_beta" in error.value.failures
