import json

import pytest

from utils.parsers import parse_box, parse_float_list, parse_json_file, parse_name_list, parse_params


def test_parse_float_list():
    """
    Test cases for the parse_float_list function.
    """
    assert parse_float_list("1,1,0,1,1,0") == [1.0, 1.0, 0.0, 1.0, 1.0, 0.0]

    # Test with spaces and a trailing comma
    assert parse_float_list(" 0.5, -2 ,1e-3,") == [0.5, -2.0, 0.001]

    # Test with the required size
    assert parse_float_list("8,8,8", 3) == [8.0, 8.0, 8.0]
    with pytest.raises(ValueError):
        parse_float_list("8,8", 3)

    # Test with a non-numeric entry
    with pytest.raises(ValueError):
        parse_float_list("1,a,2")


def test_parse_box():
    """
    Test cases for the parse_box function.
    """
    # Test with a cube
    assert parse_box("0.5,1.5") == {"lower": [0.5, 0.5, 0.5], "upper": [1.5, 1.5, 1.5]}

    # Test with one interval per axis
    assert parse_box("1,2,0.1,3,0,1.5") == {"lower": [1.0, 0.1, 0.0], "upper": [2.0, 3.0, 1.5]}

    # Test with a wrong count
    with pytest.raises(ValueError):
        parse_box("1,2,3")


def test_parse_params():
    """
    Test cases for the parse_params function.
    """
    assert parse_params(["c=0.5", " d = -1 "]) == {"c": 0.5, "d": -1.0}
    assert parse_params([]) == {}
    assert parse_params(None) == {}

    # Test with a missing separator
    with pytest.raises(ValueError):
        parse_params(["c0.5"])

    # Test with an empty key
    with pytest.raises(ValueError):
        parse_params(["=1"])

    # Test with a non-numeric value
    with pytest.raises(ValueError):
        parse_params(["c=large"])


def test_parse_name_list():
    assert parse_name_list("guichard, lame,,orthogonality ") == ["guichard", "lame", "orthogonality"]
    assert parse_name_list("") == []


def test_parse_json_file(tmp_path):
    """
    Test cases for the parse_json_file function.
    """
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"operation": "list-charts"}))
    assert parse_json_file(str(path)) == {"operation": "list-charts"}

    # Test with a missing file
    with pytest.raises(FileNotFoundError):
        parse_json_file(str(tmp_path / "missing.json"))

    # Test with malformed JSON
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    with pytest.raises(ValueError):
        parse_json_file(str(broken))
