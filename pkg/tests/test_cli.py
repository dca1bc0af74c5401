import json
import os

import pytest

from config import REPORT_SCHEMA_VERSION, SAMPLE_CONFIG_DIRECTORY
from exceptions.error import ConfigError
from command_processor.exporter import Exporter
from index import EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE, main
from run_config import RunConfig


def _run(capsys, *argv):
    code = main(list(argv))
    output = capsys.readouterr().out
    return code, (json.loads(output) if output else None)


def _sample(name):
    return os.path.join(SAMPLE_CONFIG_DIRECTORY, name)


def test_list_charts(capsys):
    code, report = _run(capsys, "list-charts")
    assert code == EXIT_OK
    assert report["schema"] == REPORT_SCHEMA_VERSION
    assert report["pass"] is True
    assert "six_sphere" in [chart["name"] for chart in report["charts"]]


def test_verify_six_sphere_passes(capsys):
    code, report = _run(capsys, "verify", "--chart", "six-sphere", "--n", "17", "--checks", "guichard,lame,chi")
    assert code == EXIT_OK
    names = [entry["name"] for entry in report["reports"]]
    assert names == ["guichard.trace", "guichard.differentiated", "lame.first", "lame.second", "chi.guichard"]
    assert report["classification"]["kind"] == "guichard"
    assert report["grid"]["counts"] == [17, 17, 17]


def test_verify_spherical_control_fails_the_guichard_check(capsys):
    code, report = _run(capsys, "verify", "--config", _sample("verify_spherical_control.json"))
    assert code == EXIT_CHECK_FAILED
    failed = [entry["name"] for entry in report["reports"] if not entry["pass"]]
    assert failed == ["guichard.trace", "guichard.differentiated"]


def test_usage_errors_exit_with_one(capsys):
    assert main(["verify", "--chart", "ellipsoidal"]) == EXIT_USAGE
    assert main(["verify", "--chart", "six_sphere", "--box", "1,2,3"]) == EXIT_USAGE
    assert main(["verify", "--chart", "six_sphere", "--n", "3"]) == EXIT_USAGE
    assert main(["verify", "--chart", "six_sphere", "--box", "0,1"]) == EXIT_USAGE
    assert main(["verify", "--config", "missing.json"]) == EXIT_USAGE
    assert capsys.readouterr().out == ""


def test_refused_construction_writes_an_error_report(capsys):
    code, report = _run(capsys, "backlund", "--chart", "spherical_control", "--n", "9")
    assert code == EXIT_CHECK_FAILED
    assert report["pass"] is False
    assert report["error"]["type"] == "PreconditionError"
    assert "guichard.trace" in report["error"]["failures"]


@pytest.mark.parametrize(
    "name",
    ["associate_six_sphere.json", "dualize_six_sphere.json", "backlund_flat.json", "decompose_flat.json"],
)
def test_sample_configurations_pass(capsys, name):
    code, report = _run(capsys, "verify", "--config", _sample(name))
    failed = [entry["name"] for entry in report["reports"] if not entry["pass"]]
    assert failed == []
    assert code == EXIT_OK


def test_backlund_flags_and_report_file(tmp_path):
    """
    Identical runs write byte-identical reports.
    """
    paths = [tmp_path / "first.json", tmp_path / "second.json"]
    for path in paths:
        code = main(
            [
                "backlund",
                "--chart",
                "flat_guichard",
                "--box=-0.5,0.5",
                "--n",
                "9",
                "--base-node",
                "4,4,4",
                "--alpha",
                "1",
                "--lambda",
                "1",
                "--report",
                str(path),
            ]
        )
        assert code == EXIT_OK
    assert paths[0].read_bytes() == paths[1].read_bytes()
    report = json.loads(paths[0].read_text())
    assert report["lambda"] == 1.0
    assert "guichard.trace" not in [entry["name"] for entry in report["reports"]]


def test_analyze_reports_families(capsys):
    code, report = _run(capsys, "analyze", "--chart", "six_sphere", "--n", "17", "--axes", "3", "--slice", "3,8")
    assert code == EXIT_OK
    assert report["families"][0]["totally_umbilic"] is True
    assert [entry["name"] for entry in report["reports"]] == [
        "slice3_8.point_equation.f",
        "slice3_8.point_equation.theta",
        "slice3_8.g_condition",
    ]


def test_export_writes_artifacts(capsys, tmp_path):
    code, report = _run(
        capsys,
        "export",
        "--chart",
        "six_sphere",
        "--n",
        "9",
        "--slice",
        "1,4",
        "--csv",
        "chi,H3",
        "--output-directory",
        str(tmp_path),
    )
    assert code == EXIT_OK
    assert sorted(os.path.basename(path) for path in report["artifacts"]) == [
        "six_sphere_H3.csv",
        "six_sphere_chi.csv",
        "six_sphere_slice1_4.obj",
    ]
    assert all(os.path.exists(path) for path in report["artifacts"])


def test_export_rejects_unknown_csv_fields(capsys, tmp_path):
    """
    Unknown CSV field names are configuration errors, raised before any artifact is written.
    """
    code, report = _run(capsys, "export", "--chart", "six_sphere", "--n", "9", "--csv", "Hx")
    assert code == EXIT_USAGE
    assert report is None

    config = RunConfig(
        operation="export",
        chart="six_sphere",
        grid={"n": 9},
        params={"csv": ["chi", "Hx"]},
        output_directory=str(tmp_path),
    )
    with pytest.raises(ConfigError) as error:
        Exporter().execute(config)
    assert "Hx" in error.value.message
    assert os.listdir(tmp_path) == []


def test_run_config_validation():
    config = RunConfig.from_dict({"operation": "verify", "chart": {"name": "six_sphere"}, "grid": {"n": 9}})
    assert config.to_dict() == {"operation": "verify", "chart": {"name": "six_sphere", "params": {}}, "grid": {"n": 9}}
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"operation": "verify"})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"operation": "backlund", "chart": {"name": "flat_guichard"}, "params": {"alpha": 0}})
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"operation": "verify", "chart": {"name": "six_sphere"}, "grid": {"n": 9, "counts": [9, 9, 9]}})
