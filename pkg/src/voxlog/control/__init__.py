from voxlog.control.commands import OP_REQUIRED, CommandError, CommandPermissionError, CommandResult, CommandSurface
from voxlog.control.config import CONFIG_VERSION, ConfigFileError, RunConfig, load_config, parse_config
from voxlog.control.inspect import LogSummary, ValidationReport, summarize_log, validate_document, validate_log
from voxlog.control.runner import EXIT_INTERNAL, EXIT_INVALID, EXIT_OK, EXIT_USAGE, RunResult, run_scenario

__all__ = [
    "CONFIG_VERSION",
    "CommandError",
    "CommandPermissionError",
    "CommandResult",
    "CommandSurface",
    "ConfigFileError",
    "EXIT_INTERNAL",
    "EXIT_INVALID",
    "EXIT_OK",
    "EXIT_USAGE",
    "LogSummary",
    "OP_REQUIRED",
    "RunConfig",
    "RunResult",
    "ValidationReport",
    "load_config",
    "parse_config",
    "run_scenario",
    "summarize_log",
    "validate_document",
    "validate_log",
]
