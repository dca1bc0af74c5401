import argparse
import os
import sys

from jsonschema import ValidationError

from command_processor.analyzer import Analyzer
from command_processor.associator import Associator
from command_processor.backlund_processor import BacklundProcessor
from command_processor.chart_lister import ChartLister
from command_processor.command_processor_interface import CommandProcessorInterface
from command_processor.decomposer import Decomposer
from command_processor.dualizer import Dualizer
from command_processor.exporter import Exporter
from command_processor.verifier import Verifier
from config import REPORT_SCHEMA_VERSION
from exceptions.error import (
    ChartNotFoundError,
    ConfigError,
    DegenerateSystemError,
    DomainError,
    GridError,
    IntegrabilityError,
    OrthonetError,
    PreconditionError,
)
from logger import get_logger
from residuals import tolerance_policy
from run_config import RunConfig
from utils.exporters import dump_report, write_json_report
from utils.parsers import parse_box, parse_float_list, parse_name_list, parse_params

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CHECK_FAILED = 2

USAGE_ERRORS = (ConfigError, ChartNotFoundError, DomainError, GridError, ValidationError, FileNotFoundError, ValueError)

PROCESSORS = {
    "verify": Verifier,
    "associate": Associator,
    "dualize": Dualizer,
    "backlund": BacklundProcessor,
    "decompose": Decomposer,
    "analyze": Analyzer,
    "export": Exporter,
    "list-charts": ChartLister,
}

logger = get_logger(__name__)


def _get_processor(operation: str) -> CommandProcessorInterface:
    """
    Returns the processor of an operation
    """
    return PROCESSORS[operation]()


def _init_app(config: RunConfig):
    """
    Creates the output directory when the run writes artifacts
    """
    if config.operation == "export" and not os.path.exists(config.output_directory):
        os.makedirs(config.output_directory)


def _error_details(error: OrthonetError) -> dict:
    details = {"type": type(error).__name__, "message": error.message}
    if isinstance(error, PreconditionError) and error.failures:
        details["failures"] = error.failures
    if isinstance(error, DegenerateSystemError) and error.node is not None:
        details["node"] = [int(i) for i in error.node]
    if isinstance(error, IntegrabilityError) and error.report is not None:
        details["report"] = error.report.to_dict()
    return details


def _emit(config: RunConfig, result: dict):
    if config.report:
        write_json_report(config.report, result)
        logger.info("Report written to %s", config.report)
    else:
        sys.stdout.write(dump_report(result))


def run(config: RunConfig) -> int:
    """
    Executes a run and writes its JSON report.

    Returns:
        int: 0 when every check passes, 2 when a check fails or a construction is refused,
        1 on usage or configuration errors.
    """
    try:
        _init_app(config)
        with tolerance_policy(**config.tolerance):
            result = _get_processor(config.operation).execute(config)
    except USAGE_ERRORS as e:
        logger.error("Invalid run: %s", e)
        return EXIT_USAGE
    except OrthonetError as e:
        logger.error("Run %s failed: %s", config.operation, e)
        result = {
            "schema": REPORT_SCHEMA_VERSION,
            "operation": config.operation,
            "pass": False,
            "reports": [],
            "error": _error_details(e),
        }
    _emit(config, result)
    return EXIT_OK if result["pass"] else EXIT_CHECK_FAILED


def _seed(value: str) -> dict:
    numbers = parse_float_list(value, 6)
    return {"gamma": numbers[:3], "gammabar": numbers[3:]}


def _slice(value: str) -> list:
    numbers = parse_float_list(value, 2)
    return [int(number) for number in numbers]


def _add_common_arguments(parser: argparse.ArgumentParser, chart: bool = True):
    parser.add_argument("--config", type=str, help="Run configuration JSON file; supersedes all other flags")
    parser.add_argument("--report", type=str, help="Write the JSON report to this file instead of stdout")
    if not chart:
        return
    parser.add_argument("--chart", type=str, help="Catalog chart name, e.g. six-sphere")
    parser.add_argument(
        "--param", action="append", default=[], help="Chart parameter key=value, may be repeated"
    )
    parser.add_argument("--n", type=int, help="Nodes per axis")
    parser.add_argument("--box", type=str, help="Coordinate box a,b or a1,b1,a2,b2,a3,b3")
    parser.add_argument("--base-node", type=str, help="Base node i,j,k")
    parser.add_argument("--output-directory", type=str, help="Directory for exported artifacts")
    parser.add_argument("--tolerance-factor", type=float, help="Factor of the h^2 tolerance")
    parser.add_argument("--tolerance-floor", type=float, help="Absolute tolerance floor")
    parser.add_argument("--collar", type=int, help="Boundary nodes excluded from residual reports")
    parser.add_argument(
        "--collar-width", type=float, help="Boundary layer excluded from residual reports, in coordinate units"
    )
    parser.add_argument("--derivative-order", type=int, choices=(2, 4), help="Finite-difference order")


def _config_from_arguments(arguments) -> dict:
    """
    Translates command-line flags into a run configuration document
    """
    operation = arguments.command
    data = {"operation": operation}
    if arguments.report:
        data["output"] = {"report": arguments.report}
    if operation == "list-charts":
        return data
    if arguments.output_directory:
        data.setdefault("output", {})["directory"] = arguments.output_directory

    if arguments.chart:
        data["chart"] = {"name": arguments.chart, "params": parse_params(arguments.param)}
    grid = {}
    if arguments.box:
        grid.update(parse_box(arguments.box))
    if arguments.n is not None:
        grid["n"] = arguments.n
    if grid:
        data["grid"] = grid

    tolerance = {
        "factor": arguments.tolerance_factor,
        "floor": arguments.tolerance_floor,
        "collar": arguments.collar,
        "collar_width": arguments.collar_width,
        "derivative_order": arguments.derivative_order,
    }
    tolerance = {key: value for key, value in tolerance.items() if value is not None}
    if tolerance:
        data["tolerance"] = tolerance

    params = {}
    if arguments.base_node:
        params["base_node"] = [int(value) for value in parse_float_list(arguments.base_node, 3)]
    if getattr(arguments, "checks", None):
        params["checks"] = parse_name_list(arguments.checks)
    for flag, key in (("c", "c"), ("h3_base", "h3_base_value"), ("alpha", "alpha"), ("lam", "lambda")):
        value = getattr(arguments, flag, None)
        if value is not None:
            params[key] = value
    if getattr(arguments, "seed", None):
        params["bianchi_seed"] = _seed(arguments.seed)
    if getattr(arguments, "data", None):
        params["data"] = arguments.data
    if getattr(arguments, "axes", None):
        params["axes"] = [int(value) for value in parse_float_list(arguments.axes)]
    if getattr(arguments, "slice", None):
        params["slices"] = [_slice(value) for value in arguments.slice]
    if getattr(arguments, "csv", None):
        params["csv"] = parse_name_list(arguments.csv)
    if params:
        data["params"] = params
    return data


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="CLI utility to construct and verify triply orthogonal systems and their transformations"
    )
    subparsers = parser.add_subparsers(dest="command", required=True, help="Command to be executed")

    verify = subparsers.add_parser("verify", help="Runs residual checks on a catalog chart")
    _add_common_arguments(verify)
    verify.add_argument("--checks", type=str, help="Comma-separated checks, e.g. guichard,lame,orthogonality")

    associate = subparsers.add_parser("associate", help="Builds an associated system of a Guichard chart")
    _add_common_arguments(associate)
    associate.add_argument("--c", type=float, help="Family parameter")
    associate.add_argument("--h3-base", type=float, help="Value of h_3 at the base node")

    dualize = subparsers.add_parser("dualize", help="Builds the dual Guichard net of a chart")
    _add_common_arguments(dualize)
    dualize.add_argument("--c", type=float, help="Family parameter")
    dualize.add_argument("--h3-base", type=float, help="Value of h_3 at the base node")

    for name, help_text in (
        ("backlund", "Applies the Backlund-type transform to a Guichard chart"),
        ("decompose", "Decomposes a Ribaucour transform into Combescure, inversion and Combescure"),
    ):
        command = subparsers.add_parser(name, help=help_text)
        _add_common_arguments(command)
        command.add_argument("--alpha", type=float, help="Bianchi parameter alpha")
        command.add_argument("--lambda", dest="lam", type=float, help="Family constant lambda")
        command.add_argument("--seed", type=str, help="Bianchi seed g1,g2,g3,gb1,gb2,gb3")
        if name == "decompose":
            command.add_argument("--data", choices=("bianchi", "inversion"), help="Source of the Ribaucour data")

    analyze = subparsers.add_parser("analyze", help="Classifies coordinate families and checks slices")
    _add_common_arguments(analyze)
    analyze.add_argument("--axes", type=str, help="Comma-separated families, e.g. 1,2,3")
    analyze.add_argument("--slice", action="append", help="Slice axis,index, may be repeated")

    export = subparsers.add_parser("export", help="Writes OBJ slices and CSV fields")
    _add_common_arguments(export)
    export.add_argument("--slice", action="append", help="Slice axis,index, may be repeated")
    export.add_argument("--csv", type=str, help="Comma-separated fields: chi,H1,H2,H3")

    list_charts = subparsers.add_parser("list-charts", help="Lists the catalog charts")
    _add_common_arguments(list_charts, chart=False)
    return parser


def main(argv=None) -> int:
    """
    Main function to parse the command line arguments and run the respective processor
    """
    arguments = _build_parser().parse_args(argv)
    try:
        if arguments.config:
            config = RunConfig.from_file(arguments.config)
        else:
            config = RunConfig.from_dict(_config_from_arguments(arguments))
    except USAGE_ERRORS as e:
        logger.error("Invalid configuration: %s", e)
        return EXIT_USAGE
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
