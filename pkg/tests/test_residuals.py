import math

import numpy as np
import pytest

from residuals import (
    DEFAULT_POLICY,
    all_passed,
    current_policy,
    exceeds_gate,
    field_scale,
    nonvanishing,
    residual_report,
    tolerance_policy,
)

SPACING = (0.1, 0.1, 0.1)
SUMMARY = {"counts": [9, 9, 9]}


def _report(residual, **kwargs):
    return residual_report("residual", [residual], spacing=SPACING, grid_summary=SUMMARY, **kwargs)


def test_tolerance_scales_with_spacing_and_terms():
    """
    tau = max(floor, factor * h^2 * scale).
    """
    assert DEFAULT_POLICY.tolerance((0.1, 0.2, 0.1), 3.0) == pytest.approx(5 * 0.04 * 3.0)
    assert DEFAULT_POLICY.tolerance((1e-6,) * 3, 1.0) == DEFAULT_POLICY.floor


def test_tolerance_policy_overrides_are_scoped():
    """
    Overrides apply inside the context only; None values keep the active setting.
    """
    with tolerance_policy(factor=50, collar=None) as policy:
        assert policy.factor == 50
        assert current_policy().collar == DEFAULT_POLICY.collar
    assert current_policy() == DEFAULT_POLICY


def test_report_excludes_collar_and_finds_worst_node():
    """
    Boundary spikes inside the collar are ignored; the worst interior node is reported.
    """
    residual = np.zeros((9, 9, 9))
    residual[0, 0, 0] = 100.0
    residual[4, 5, 3] = 1e-3
    report = _report(residual, terms=[np.ones((9, 9, 9))])
    assert report.collar_excluded
    assert report.sup == pytest.approx(1e-3)
    assert report.worst_node == (4, 5, 3)
    assert report.tolerance == pytest.approx(5 * 0.01)
    assert report.passed

    with tolerance_policy(collar=0):
        assert not _report(residual, terms=[np.ones((9, 9, 9))]).passed


def test_report_masks_singular_nodes():
    """
    Masked nodes leave the evaluation region and are counted in masked_fraction.
    """
    residual = np.ones((9, 9, 9))
    mask = np.zeros((9, 9, 9), dtype=bool)
    report = _report(residual, mask=mask, collar=0)
    assert report.passed
    assert report.masked_fraction == pytest.approx(1.0)
    assert report.details["degenerate"] == "empty evaluation mask"


def test_non_finite_residuals_fail_and_serialize_as_null():
    residual = np.zeros((9, 9, 9))
    residual[4, 4, 4] = np.nan
    report = _report(residual)
    assert not report.passed
    assert exceeds_gate(report)
    data = report.to_dict()
    assert data["sup"] is None
    assert data["pass"] is False
    assert not all_passed([report])


def test_exceeds_gate_uses_gate_factor():
    """
    A report failing by less than the gate factor is a failure but not a refusal.
    """
    residual = np.full((9, 9, 9), 2e-8)
    report = _report(residual, scale=0.0)
    assert not report.passed
    assert not exceeds_gate(report)
    assert exceeds_gate(_report(residual * 100, scale=0.0))


def test_field_scale_and_nonvanishing():
    values = np.ones((2, 5, 5, 5))
    values[1, 2, 2, 2] = 0.0
    values[0, 0, 0, 0] = math.inf
    assert field_scale(values, np.array([-3.0])) == 3.0
    mask = nonvanishing(values)
    assert mask.shape == (5, 5, 5)
    assert not mask[2, 2, 2]
    assert mask.sum() == 124


def test_report_on_surface_lattice():
    """
    Two spacings mean two lattice axes; the leading axis is reduced.
    """
    residual = np.zeros((2, 7, 7))
    residual[1, 3, 3] = 0.5
    report = residual_report("surface", residual, spacing=(0.1, 0.1), grid_summary={}, scale=1.0)
    assert report.worst_node == (3, 3)
    assert report.to_dict()["name"] == "surface"


def test_pointwise_gate_does_not_widen_on_coarse_grids():
    """
    A pointwise identity failing by 10 % of its scale is refused even where gate_factor * tau
    would admit it; a finite-difference residual of the same size is not.
    """
    coarse = (0.2, 0.2, 0.2)
    residual = np.full((9, 9, 9), 0.1)
    terms = [np.ones((9, 9, 9))]
    pointwise = residual_report(
        "trace", [residual], spacing=coarse, grid_summary=SUMMARY, terms=terms, pointwise=True
    )
    differenced = residual_report("derivative", [residual], spacing=coarse, grid_summary=SUMMARY, terms=terms)
    assert pointwise.scale == pytest.approx(1.0)
    assert pointwise.passed and differenced.passed
    assert exceeds_gate(pointwise)
    assert not exceeds_gate(differenced)
    with tolerance_policy(pointwise_gate=0.5):
        assert not exceeds_gate(pointwise)


def test_pointwise_gate_keeps_the_finer_bound():
    """
    On fine grids gate_factor * tau is the smaller bound and still applies.
    """
    fine = (0.01, 0.01, 0.01)
    residual = np.full((9, 9, 9), 1e-3)
    terms = [np.ones((9, 9, 9))]
    report = residual_report("trace", [residual], spacing=fine, grid_summary=SUMMARY, terms=terms, pointwise=True)
    assert DEFAULT_POLICY.gate_factor * report.tolerance < DEFAULT_POLICY.pointwise_tolerance(1.0)
    assert not exceeds_gate(report)
    with tolerance_policy(factor=1e-4):
        tight = residual_report("trace", [residual], spacing=fine, grid_summary=SUMMARY, terms=terms, pointwise=True)
        assert exceeds_gate(tight)


def test_collar_width_excludes_the_same_sub_box_on_every_grid():
    """
    A collar given in coordinate units covers two nodes at h = 0.1 and four at h = 0.05.
    """
    fine = np.zeros((17, 17, 17))
    fine[3, 8, 8] = 1.0
    fine[4, 8, 8] = 1e-3
    with tolerance_policy(collar_width=0.2) as policy:
        assert policy.collar_nodes((0.1, 0.1, 0.1)) == (2, 2, 2)
        assert policy.collar_nodes((0.05, 0.1, 0.05)) == (4, 2, 4)
        report = residual_report("residual", [fine], spacing=(0.05,) * 3, grid_summary=SUMMARY, scale=1.0)
    assert report.sup == pytest.approx(1e-3)
    assert report.worst_node == (4, 8, 8)
    assert residual_report("residual", [fine], spacing=(0.05,) * 3, grid_summary=SUMMARY, scale=1.0).sup == 1.0
