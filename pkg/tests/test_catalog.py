import numpy as np
import pytest

from catalog import CHARTS, chart_of, instantiate, list_charts, normalize_name, sample
from charts.six_sphere import six_sphere_dual_h3_unhalved
from exceptions.error import ChartNotFoundError, DomainError
from grid import GridSpec
from guichard import check_guichard

SQRT2 = np.sqrt(2.0)


def test_registry_names_and_metadata():
    assert normalize_name(" six-sphere ") == "six_sphere"
    names = [chart["name"] for chart in list_charts()]
    assert names == sorted(CHARTS)
    assert {"flat_guichard", "six_sphere", "six_sphere_associated", "six_sphere_dual", "spherical_control"} <= set(names)


def test_instantiate_validates_names_and_parameters():
    with pytest.raises(ChartNotFoundError):
        instantiate("ellipsoidal")
    with pytest.raises(DomainError):
        instantiate("six_sphere", {"c": 1.0})
    with pytest.raises(DomainError):
        instantiate("six_sphere_dual", {"c": float("nan")})
    assert instantiate("six-sphere-dual", {"c": 2}).params == {"c": 2.0}


def test_sample_rejects_grids_outside_the_box():
    with pytest.raises(DomainError):
        sample(instantiate("six_sphere"), GridSpec.cube(0.0, 1.0, 5))


def test_dual_chart_values_at_unit_point():
    """
    At (1, 1, 1) and c = 0 the dual net has H* = (2, 2, -2 sqrt2).
    """
    grid = GridSpec.cube(0.5, 1.5, 5)
    system = sample(instantiate("six_sphere_dual"), grid)
    np.testing.assert_allclose(system.H[:, 2, 2, 2], [2.0, 2.0, -2.0 * SQRT2], atol=1e-12)
    assert chart_of(system).name == "six_sphere_dual"


def test_dual_chart_is_guichard_and_unhalved_variant_is_not():
    """
    The halved leading term satisfies the Guichard trace; the unhalved variant does not.
    """
    grid = GridSpec.cube(0.5, 1.5, 17)
    system = sample(instantiate("six_sphere_dual", {"c": 0.3}), grid)
    trace, differentiated = check_guichard(system)
    assert trace.passed
    assert differentiated.passed

    X, Y, Z = grid.mesh()
    H = system.H.copy()
    H[2] = six_sphere_dual_h3_unhalved(X, Y, Z, 0.3)
    assert six_sphere_dual_h3_unhalved(1.0, 1.0, 1.0) == pytest.approx(-4.0 * SQRT2)
    broken = type(system)(grid=grid, f=system.f, H=H, N=system.N, beta=system.beta)
    assert not check_guichard(broken)[0].passed


def test_sample_integrates_charts_without_closed_form_position():
    """
    Combescure charts get f by integration, anchored at the base point.
    """
    grid = GridSpec.cube(0.5, 1.5, 9)
    system = sample(instantiate("six_sphere_associated", {"c": 10.0}), grid, (4, 4, 4), (1.0, 2.0, 3.0))
    np.testing.assert_allclose(system.f[:, 4, 4, 4], [1.0, 2.0, 3.0])
    assert system.provenance == {"chart": "six_sphere_associated", "params": {"c": 10.0}}
    assert not system.degenerate
