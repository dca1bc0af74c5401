from dataclasses import replace

import numpy as np
import pytest

from catalog import instantiate, sample
from charts.six_sphere import SixSphereChart
from combescure import CombescureTriple
from exceptions.error import IntegrabilityError, PreconditionError
from grid import GridSpec
from surface_geometry import (
    SurfaceCombescurePair,
    analyze_family,
    check_channel_form,
    check_demoulin,
    check_dual_relation,
    check_G_condition,
    check_pair_compatibility,
    check_phi_equation,
    check_surface_point_solution,
    eisenhart_pair_from_phi,
    extract_slice,
    isothermic_dual_pair,
    restrict_triple,
    signature_epsilon,
    slice_directions,
    surface_dual,
)

SQRT2 = np.sqrt(2.0)
MIDDLE = 8


@pytest.fixture(scope="module")
def six_sphere():
    return sample(instantiate("six_sphere"), GridSpec.cube(0.5, 1.5, 17))


@pytest.fixture(scope="module")
def triple(six_sphere):
    chart = SixSphereChart()
    X, Y, Z = six_sphere.grid.mesh()
    return CombescureTriple(
        chart.associated_multipliers(X, Y, Z), six_sphere, chart.associated_multiplier_gradient(X, Y, Z)
    )


@pytest.fixture(scope="module")
def slice3(six_sphere):
    return extract_slice(six_sphere, 3, MIDDLE)


@pytest.fixture(scope="module")
def pair3(triple):
    return restrict_triple(triple, 3, MIDDLE)


def test_slice_conventions():
    assert slice_directions(1) == (1, 2)
    assert slice_directions(3) == (0, 1)
    assert signature_epsilon(3) == 1.0
    assert signature_epsilon(1) == -1.0
    assert signature_epsilon(2) == -1.0
    with pytest.raises(ValueError):
        slice_directions(0)


def test_extract_slice_curvatures(six_sphere, slice3):
    """
    The slices z = const of the 6-sphere net are spheres with kappa = 2 sqrt2 z.
    """
    z = six_sphere.grid.axis_values(3)[MIDDLE]
    assert slice3.H1.shape == (17, 17)
    np.testing.assert_allclose(slice3.kappa1, 2.0 * SQRT2 * z)
    np.testing.assert_allclose(slice3.kappa2, 2.0 * SQRT2 * z)
    assert slice3.umbilic
    assert slice3.epsilon == 1.0
    np.testing.assert_allclose(slice3.f, six_sphere.f[:, :, :, MIDDLE])


def test_spherical_cone_slices_are_not_umbilic():
    chart = instantiate("spherical_control")
    system = sample(chart, GridSpec(chart.lower, chart.upper, (9, 9, 9)))
    surface = extract_slice(system, 2, 0)
    assert not surface.umbilic
    np.testing.assert_allclose(surface.kappa1, 0.0, atol=1e-12)
    assert check_surface_point_solution(surface, surface.f).passed


def test_restricted_triple_is_a_compatible_pair(slice3, pair3):
    assert check_pair_compatibility(slice3, pair3).passed
    assert check_surface_point_solution(slice3, slice3.f).passed
    assert pair3.h.shape == pair3.gradient_h.shape[1:] == (17, 17)


def test_G_condition_holds_on_guichard_slices(six_sphere, triple):
    """
    Every coordinate surface of a Guichard net is a G-surface with the slice sign.
    """
    for axis in (1, 2, 3):
        surface = extract_slice(six_sphere, axis, 4)
        report = check_G_condition(surface, restrict_triple(triple, axis, 4), surface.epsilon)
        assert report.fixed.passed, axis
        assert report.passed
        assert report.nontrivial


def test_G_condition_fit_recovers_the_reparametrization(slice3, pair3):
    """
    Doubling the pair breaks the fixed form; the fit finds chi_1 = chi_2 = 1/2.
    """
    doubled = SurfaceCombescurePair(2.0 * pair3.h, 2.0 * pair3.l, 2.0 * pair3.gradient_h, 2.0 * pair3.gradient_l)
    report = check_G_condition(slice3, doubled, 1.0, fit=True)
    assert not report.fixed.passed
    assert report.reparametrized.passed
    np.testing.assert_allclose(report.chi1, 0.5, rtol=1e-6)
    np.testing.assert_allclose(report.chi2, 0.5, rtol=1e-6)
    assert report.to_dict()["pass"] is True
    with pytest.raises(ValueError):
        check_G_condition(slice3, pair3, 1.0, c=0.0)


def test_surface_dual_matches_the_dual_net(six_sphere, slice3, pair3):
    """
    The star pair is the restriction of the dual multipliers -h_i^2 + eps_i / H_i^2.
    """
    star = surface_dual(slice3, pair3, slice3.epsilon)
    H = six_sphere.H[:, :, :, MIDDLE]
    np.testing.assert_allclose(star.h, -(pair3.h**2) + 1.0 / H[0] ** 2, atol=1e-10)
    np.testing.assert_allclose(star.l, -(pair3.l**2) + 1.0 / H[1] ** 2, atol=1e-10)
    assert all(report.passed for report in star.diagnostics.values())
    assert set(star.diagnostics) == {"g_condition.fixed", "surface_pair.compatibility", "dual_relation"}

    relation = check_dual_relation(slice3, pair3, star)
    assert relation.passed
    assert relation.details["nontrivial"] is True

    negative = surface_dual(slice3, pair3, slice3.epsilon, sign=-1)
    np.testing.assert_allclose(negative.h, -star.h)
    with pytest.raises(ValueError):
        surface_dual(slice3, pair3, slice3.epsilon, sign=2)


def test_surface_dual_refuses_pairs_violating_the_G_condition(slice3, pair3):
    doubled = SurfaceCombescurePair(2.0 * pair3.h, 2.0 * pair3.l, 2.0 * pair3.gradient_h, 2.0 * pair3.gradient_l)
    with pytest.raises(IntegrabilityError):
        surface_dual(slice3, doubled, 1.0)


def test_demoulin_identity(slice3, pair3):
    """
    Umbilic slices are masked out; with distinct curvatures the identity holds whenever the
    G-condition does.
    """
    star = surface_dual(slice3, pair3, 1.0)
    umbilic = check_demoulin(slice3, star, 1.0)
    assert umbilic.details["degenerate"] == "totally umbilic"
    assert umbilic.masked_fraction == pytest.approx(1.0)

    x = np.linspace(0.0, 1.0, 17)
    X, Y = np.meshgrid(x, x, indexing="ij")
    curved = replace(slice3, kappa1=1.0 + X**2, kappa2=3.0 + Y, umbilic=False)
    report = check_demoulin(curved, star, 1.0)
    assert report.passed
    assert report.masked_fraction < 0.5
    with pytest.raises(PreconditionError):
        check_demoulin(slice3, pair3, 1.0)


def test_eisenhart_pair_from_phi(six_sphere, slice3, pair3):
    """
    phi = h_1 - h_2 = sqrt2 D integrates back to the associated pair.
    """
    phi = pair3.h - pair3.l
    assert check_phi_equation(slice3, phi).passed
    rebuilt = eisenhart_pair_from_phi(slice3, phi, pair3.h[0, 0])
    np.testing.assert_allclose(rebuilt.h, pair3.h, atol=1e-9)
    np.testing.assert_allclose(rebuilt.l, pair3.l, atol=1e-9)
    assert rebuilt.diagnostics["eisenhart.closedness"].passed

    x = six_sphere.grid.axis_values(1)
    X, Y = np.meshgrid(x, x, indexing="ij")
    with pytest.raises(PreconditionError):
        eisenhart_pair_from_phi(slice3, np.exp(3.0 * X * Y))


def test_isothermic_dual_of_a_sphere(slice3):
    """
    H_1 = H_2 = 1/D on z = const; the Christoffel dual has (h*, l*) = (D^2, -D^2).
    """
    star = isothermic_dual_pair(slice3)
    np.testing.assert_allclose(star.h, 1.0 / slice3.H1**2)
    np.testing.assert_allclose(star.l, -1.0 / slice3.H2**2)
    assert star.diagnostics["surface_pair.compatibility"].passed


def test_isothermic_dual_requires_isothermic_slices():
    chart = instantiate("spherical_control")
    system = sample(chart, GridSpec(chart.lower, chart.upper, (9, 9, 9)))
    with pytest.raises(PreconditionError):
        isothermic_dual_pair(extract_slice(system, 2, 0))


def test_channel_form_on_planes():
    grid = GridSpec.cube(-1.0, 1.0, 9)
    surface = extract_slice(sample(instantiate("flat_guichard"), grid), 3, 4)
    form, curvature = check_channel_form(surface, SurfaceCombescurePair.constant(surface, 1.0, 0.0))
    assert form.passed
    assert curvature.passed


def test_analyze_family_classifications(six_sphere):
    """
    6-sphere families are totally umbilic and cyclic but not parallel; concentric spheres
    are parallel.
    """
    for axis in (1, 2, 3):
        analysis = analyze_family(six_sphere, axis)
        assert analysis.totally_umbilic, axis
        assert analysis.cyclic, axis
        assert not analysis.parallel, axis
        assert np.abs(analysis.torsion).max() < 1e-8
        assert [report.name for report in analysis.reports] == [
            f"family{axis}.parallel",
            f"family{axis}.umbilic",
            f"family{axis}.cyclic",
            f"family{axis}.torsion",
        ]

    chart = instantiate("spherical_control")
    spheres = analyze_family(sample(chart, GridSpec(chart.lower, chart.upper, (9, 9, 9))), 1)
    assert spheres.parallel
    assert spheres.totally_umbilic
    assert spheres.to_dict()["axis"] == 1
