# src/utils/logging_config.py

import logging
from typing import Optional

from src.utils.settings import get_settings


def setup_logging(log_file: Optional[str] = None, level: Optional[str] = None) -> None:
    """Configure root logging for command-line runs"""
    settings = get_settings()
    log_file = log_file or settings.log_file
    level = (level or settings.log_level).upper()

    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(log_file),
            logging.StreamHandler()
        ],
        force=True,
    )
    # scipy emits IntegrationWarning through warnings; route it into the log
    logging.captureWarnings(True)
