"""
Configuration package.

Run configuration (defaults, config file, environment, command-line flags)
and the logging set-up shared by every command.
"""

from .logging_config import close_logging, setup_logging
from .run_config import ENV_PREFIX, RUN_CONFIG_SCHEMA, RunConfig, load_run_config, validate_config_dict

__version__ = "1.0.0"
__all__ = [
    'close_logging', 'setup_logging', 'ENV_PREFIX', 'RUN_CONFIG_SCHEMA', 'RunConfig',
    'load_run_config', 'validate_config_dict',
]
