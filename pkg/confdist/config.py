"""
Configuration and shared names for the confdist package.

Re-exports the most used items so callers can write
`from confdist.config import post_star, ConfDistError, ...`:
- confdist.core.constants: limits and exit codes
- confdist.core.errors: exception hierarchy
- confdist.core.state and confdist.models: run statistics and settings
- confdist.modules.*: engines
"""
import json
import os
from typing import Optional

from pydantic import ValidationError

from confdist.core.constants import (
    CONFIG_FILE,
    DEFAULT_RELAXATION_CAP,
    EXIT_DIAGNOSTIC,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VALIDATION,
)
from confdist.core.errors import (
    AutomatonShapeError,
    BudgetExceededError,
    ConfDistError,
    ContextBoundError,
    DocumentError,
    IllFormedConfigurationError,
    InconclusiveError,
    NonTerminationError,
    SemiringMismatchError,
)
from confdist.core.state import EngineStats
from confdist.models import AnalysisSettings
from confdist.modules.module_automaton import accept_weight, entries_automaton, singleton_automaton
from confdist.modules.module_confdist import post_star, summaries
from confdist.modules.module_rsm import Configuration, Rsm, Superconfiguration, validate
from confdist.modules.module_semiring import semiring_from_name
from confdist.utils.console import log_console

__all__ = [
    "CONFIG_FILE", "DEFAULT_RELAXATION_CAP",
    "EXIT_OK", "EXIT_VALIDATION", "EXIT_USAGE", "EXIT_DIAGNOSTIC",
    "AutomatonShapeError", "BudgetExceededError", "ConfDistError", "ContextBoundError",
    "DocumentError", "IllFormedConfigurationError", "InconclusiveError",
    "NonTerminationError", "SemiringMismatchError",
    "EngineStats", "AnalysisSettings",
    "accept_weight", "entries_automaton", "singleton_automaton",
    "post_star", "summaries",
    "Configuration", "Rsm", "Superconfiguration", "validate",
    "semiring_from_name",
    "load_config",
]


def load_config(config_path: Optional[str] = None) -> AnalysisSettings:
    """
    Load and validate the settings file.
    Falls back to defaults, with a warning, on any problem.
    """
    explicit = config_path is not None
    config_path = config_path or CONFIG_FILE

    if not os.path.exists(config_path):
        if explicit:
            log_console(f"Config file '{config_path}' not found. Using default settings.", "warning")
        return AnalysisSettings()

    try:
        with open(config_path, "r", encoding="utf-8") as f:
            raw = json.load(f)
        if not isinstance(raw, dict):
            raise ValueError("config must be a JSON object")
        return AnalysisSettings.model_validate(raw)
    except (OSError, ValueError, ValidationError) as e:
        log_console(f"Invalid config file '{config_path}': {e}. Using default settings.", "warning")
        return AnalysisSettings()
