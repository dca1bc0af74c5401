"""
Configuration settings for orthonet.

This module collects the paths and the numerical settings used across the package:
- Application paths (schema, output directory)
- Report schema version
- Tolerance policy defaults, mask threshold and boundary collar
- Log level

Numerical settings can be overridden through environment variables or a `.env` file.
"""

import os
from dotenv import load_dotenv

APP_PATH = os.path.dirname(os.path.dirname(os.path.realpath(__file__)))
RUN_CONFIG_SCHEMA = f"{APP_PATH}/schema/run_config_schema.json"
SAMPLE_CONFIG_DIRECTORY = f"{APP_PATH}/sample_configs"

REPORT_SCHEMA_VERSION = "orthonet/1"

# Load environment variables from .env file
load_dotenv()

OUTPUT_DIRECTORY = os.getenv("ORTHONET_OUTPUT_DIRECTORY", f"{APP_PATH}/output")
LOG_LEVEL = os.getenv("ORTHONET_LOG_LEVEL", "INFO").upper()

NUMERICS_CONFIGURATIONS = {
    "tolerance_factor": float(os.getenv("ORTHONET_TOLERANCE_FACTOR", "5")),
    "tolerance_floor": float(os.getenv("ORTHONET_TOLERANCE_FLOOR", "1e-8")),
    "gate_factor": float(os.getenv("ORTHONET_GATE_FACTOR", "10")),
    "pointwise_gate": float(os.getenv("ORTHONET_POINTWISE_GATE", "1e-2")),
    "mask_threshold": float(os.getenv("ORTHONET_MASK_THRESHOLD", "1e-6")),
    "collar": int(os.getenv("ORTHONET_COLLAR", "2")),
    "derivative_order": int(os.getenv("ORTHONET_DERIVATIVE_ORDER", "2")),
}

# Signature of the Minkowski trace H1^2 + H2^2 - H3^2
EPSILON = (1.0, 1.0, -1.0)
