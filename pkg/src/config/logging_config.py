"""
Logging set-up for pipeline runs: a coloured console handler plus a DEBUG
log file per session.
"""

import logging
import os
from datetime import datetime
from typing import List, Optional

import colorlog

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'
LOG_DATEFMT = '%Y-%m-%d %H:%M:%S'
CONSOLE_FORMAT = '%(log_color)s%(levelname)s: %(message)s'
LOG_COLORS = {
    'DEBUG': 'cyan',
    'INFO': 'green',
    'WARNING': 'yellow',
    'ERROR': 'red',
    'CRITICAL': 'bold_red',
}

# handlers installed by setup_logging, removed again by close_logging
_installed: List[logging.Handler] = []


def setup_logging(level: str = "INFO", log_dir: str = "logs", console: bool = True) -> str:
    """
    Configure the root logger for a run.

    Args:
        level: console level name
        log_dir: directory for the session log file (created if missing)
        console: attach the coloured console handler

    Returns:
        Path of the session log file
    """
    close_logging(banner=False)
    os.makedirs(log_dir, exist_ok=True)
    timestamp = datetime.now().strftime("%Y%m%d-%H%M%S")
    log_file = os.path.join(log_dir, f"soilmap-{timestamp}.log")

    root = logging.getLogger()
    root.setLevel(logging.DEBUG)

    file_handler = logging.FileHandler(log_file, mode='w', encoding='utf-8')
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=LOG_DATEFMT))
    root.addHandler(file_handler)
    _installed.append(file_handler)

    if console:
        console_handler = colorlog.StreamHandler()
        console_handler.setLevel(getattr(logging, level.upper(), logging.INFO))
        console_handler.setFormatter(colorlog.ColoredFormatter(CONSOLE_FORMAT, log_colors=LOG_COLORS))
        root.addHandler(console_handler)
        _installed.append(console_handler)

    # keep joblib chatter out of the session log
    logging.getLogger("joblib").setLevel(logging.WARNING)
    return log_file


def close_logging(banner: bool = True, logger: Optional[logging.Logger] = None):
    """Log the session end and detach the handlers installed by setup_logging."""
    if banner and _installed:
        log = logger or logging.getLogger(__name__)
        log.info("=" * 60)
        log.info("SOIL MAPPING SESSION ENDED")
        log.info("=" * 60)
    root = logging.getLogger()
    for handler in _installed[:]:
        handler.close()
        root.removeHandler(handler)
        _installed.remove(handler)
