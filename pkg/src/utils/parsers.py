"""
This module provides utility functions for parsing run configurations and command-line values.

Functions:
  parse_json_file(file_path: str) -> dict | list:
    Parses a JSON file.

  parse_float_list(value: str, size: int = None) -> list:
    Parses comma-separated reals, e.g. "1,1,0,1,1,0".

  parse_box(value: str) -> dict:
    Parses a coordinate box "a,b" or "a1,b1,a2,b2,a3,b3".

  parse_params(pairs: list) -> dict:
    Parses repeated key=value chart parameters.

  parse_name_list(value: str) -> list:
    Parses comma-separated names, e.g. "guichard,lame".
"""

import json
import os


def parse_json_file(file_path: str) -> dict | list:
    """
    Parses a JSON file and returns the data in the json file.
    Args:
        file_path (str): The path to the file to be parsed.
    Returns:
        dict | list: The parsed JSON data.
    Raises:
        FileNotFoundError: If the file does not exist.
        ValueError: If there is an error parsing the JSON from the file.
    """

    if not os.path.exists(file_path):
        raise FileNotFoundError(f"Config file {file_path} not found.")

    with open(file_path, "r", encoding="utf-8") as file:
        try:
            data = json.load(file)
        except json.JSONDecodeError as e:
            raise ValueError(f"Error parsing JSON from config file {file_path}: {e}") from e

    return data


def parse_float_list(value: str, size: int = None) -> list:
    """
    Parses comma-separated reals.

    Args:
      value (str): Text such as "1,1,0".
      size (int, optional): Required number of entries.

    Returns:
      list: The parsed floats.

    Raises:
      ValueError: If an entry is not a number or the count differs from `size`.
    """
    try:
        numbers = [float(item) for item in value.split(",") if item.strip()]
    except ValueError as e:
        raise ValueError(f"Invalid list of numbers '{value}': {e}") from e
    if size is not None and len(numbers) != size:
        raise ValueError(f"Expected {size} numbers, got {len(numbers)} in '{value}'")
    return numbers


def parse_box(value: str) -> dict:
    """
    Parses a coordinate box. Two numbers give the cube [a, b]^3, six numbers give
    [a1, b1] x [a2, b2] x [a3, b3].

    Returns:
      dict: {"lower": [...], "upper": [...]}
    """
    numbers = parse_float_list(value)
    if len(numbers) == 2:
        numbers = numbers * 3
    if len(numbers) != 6:
        raise ValueError(f"A box needs 2 or 6 numbers, got {len(numbers)} in '{value}'")
    return {"lower": numbers[0::2], "upper": numbers[1::2]}


def parse_params(pairs: list) -> dict:
    """
    Parses key=value pairs into a dict of floats.

    Args:
      pairs (list): Strings such as ["c=0.5"].

    Returns:
      dict: Parameter names mapped to floats.
    """
    params = {}
    for pair in pairs or []:
        key, separator, value = pair.partition("=")
        if not separator or not key.strip():
            raise ValueError(f"Parameter '{pair}' is not of the form key=value")
        try:
            params[key.strip()] = float(value)
        except ValueError as e:
            raise ValueError(f"Parameter '{pair}' has a non-numeric value") from e
    return params


def parse_name_list(value: str) -> list:
    """
    Parses comma-separated names, dropping blanks.
    """
    return [item.strip() for item in value.split(",") if item.strip()]
