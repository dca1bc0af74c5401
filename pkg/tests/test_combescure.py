import numpy as np
import pytest

from catalog import instantiate, sample
from charts.six_sphere import SixSphereAssociatedChart, SixSphereChart
from combescure import (
    CombescureTriple,
    PhiTriple,
    apply_combescure,
    check_combescure,
    check_phi_triple,
    check_shared_beta,
    invert_triple,
    multipliers_between,
    phi_triple_to_combescure,
)
from exceptions.error import IntegrabilityError, PreconditionError
from grid import GridSpec
from tos_core import CYCLIC

C = 10.0


@pytest.fixture(scope="module")
def grid():
    return GridSpec.cube(0.5, 1.5, 17)


@pytest.fixture(scope="module")
def seed(grid):
    return sample(instantiate("six_sphere"), grid)


@pytest.fixture(scope="module")
def associated_triple(grid, seed):
    chart = SixSphereChart()
    X, Y, Z = grid.mesh()
    return CombescureTriple(
        chart.associated_multipliers(X, Y, Z) + C, seed, chart.associated_multiplier_gradient(X, Y, Z)
    )


def test_constant_triple_scales_the_system(seed):
    """
    h = (2, 2, 2) gives f^ = 2 f when anchored at 2 f(base).
    """
    base = (8, 8, 8)
    scaled = apply_combescure(seed, CombescureTriple.constant(seed, 2.0), base, 2.0 * seed.f[:, 8, 8, 8])
    np.testing.assert_allclose(scaled.f, 2.0 * seed.f, atol=1e-2)
    np.testing.assert_allclose(scaled.H, 2.0 * seed.H)
    assert scaled.diagnostics["combescure"].passed


def test_associated_multipliers_give_the_associated_chart(grid, seed, associated_triple):
    """
    The closed-form multipliers satisfy the Combescure system and reproduce the chart.
    """
    assert check_combescure(seed, associated_triple).passed
    transformed = apply_combescure(seed, associated_triple, (8, 8, 8))
    X, Y, Z = grid.mesh()
    chart = SixSphereAssociatedChart({"c": C})
    np.testing.assert_allclose(transformed.H, chart.lame(X, Y, Z), atol=1e-12)
    np.testing.assert_allclose(transformed.dH, chart.lame_gradient(X, Y, Z), atol=1e-10)
    np.testing.assert_allclose(transformed.f[:, 8, 8, 8], 0.0)
    assert transformed.diagnostics["combescure.closedness"].passed
    assert check_shared_beta(seed, transformed).passed
    assert transformed.provenance["transform"] == "combescure"


def test_incompatible_multipliers_are_refused(grid, seed):
    X, _, _ = grid.mesh()
    triple = CombescureTriple(np.stack((10.0 * X, np.ones_like(X), np.ones_like(X))), seed)
    assert not check_combescure(seed, triple).passed
    with pytest.raises(IntegrabilityError):
        apply_combescure(seed, triple)


def test_phi_triple_integrates_to_the_multipliers(grid, seed, associated_triple):
    """
    phi_k = h_i - h_j over cyclic (i, j, k) recovers h with h_3 anchored at the base node.
    """
    h, dh = associated_triple.h, associated_triple.gradient
    phi = np.empty_like(h)
    dphi = np.empty_like(dh)
    for i, j, k in CYCLIC:
        phi[k] = h[i] - h[j]
        dphi[:, k] = dh[:, i] - dh[:, j]
    phis = PhiTriple(phi, dphi)
    total, derivative = check_phi_triple(seed, phis)
    assert total.passed and derivative.passed

    base = (8, 8, 8)
    recovered = phi_triple_to_combescure(seed, phis, c=h[2][base], base_node=base)
    np.testing.assert_allclose(recovered.h[(slice(None),) + base], h[(slice(None),) + base], atol=1e-12)
    np.testing.assert_allclose(recovered.h, h, atol=5e-3)


def test_phi_triple_with_nonzero_sum_is_refused(seed):
    phis = PhiTriple(np.ones((3,) + seed.grid.shape), np.zeros((3, 3) + seed.grid.shape))
    with pytest.raises(PreconditionError) as error:
        phi_triple_to_combescure(seed, phis)
    assert "phi_triple.sum" in error.value.failures


def test_multipliers_between_and_inverse(grid, seed, associated_triple):
    """
    H^/H recovers the multipliers; their reciprocals take the transform back.
    """
    transformed = apply_combescure(seed, associated_triple)
    recovered = multipliers_between(seed, transformed)
    np.testing.assert_allclose(recovered.h, associated_triple.h, atol=1e-12)
    np.testing.assert_allclose(recovered.gradient, associated_triple.gradient, atol=1e-10)

    inverse = invert_triple(associated_triple, transformed)
    assert check_combescure(transformed, inverse).passed
    back = apply_combescure(transformed, inverse)
    np.testing.assert_allclose(back.H, seed.H, atol=1e-12)
