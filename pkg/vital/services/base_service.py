"""
Base service class for every pipeline stage.

Logging is configured once per process: a rotating file under the log
directory plus the console, both with the same line format.
"""

from typing import Any, Optional
import logging
import os
from logging.handlers import RotatingFileHandler

from ..config.settings import settings

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LOG_FILE_NAME = 'vital.log'

_logging_configured = False


def configure_logging(log_dir: Optional[str] = None, level: Optional[str] = None, force: bool = False) -> None:
    """Attach the rotating file handler and the console handler to the root logger."""
    global _logging_configured
    if _logging_configured and not force:
        return

    log_dir = log_dir or settings.log_dir
    os.makedirs(log_dir, exist_ok=True)

    # 10MB per file, keep 5 backups
    file_handler = RotatingFileHandler(
        os.path.join(log_dir, LOG_FILE_NAME),
        maxBytes=10 * 1024 * 1024,
        backupCount=5,
        encoding='utf-8'
    )
    console_handler = logging.StreamHandler()

    formatter = logging.Formatter(LOG_FORMAT)
    file_handler.setFormatter(formatter)
    console_handler.setFormatter(formatter)

    root_logger = logging.getLogger()
    root_logger.setLevel(getattr(logging, (level or settings.log_level).upper(), logging.INFO))
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)
    root_logger.addHandler(file_handler)
    root_logger.addHandler(console_handler)

    _logging_configured = True


class BaseService:
    """Base class for all services in the system."""

    def __init__(self, logger: Optional[logging.Logger] = None):
        configure_logging()
        self.logger = logger or logging.getLogger(self.__class__.__name__)

    async def initialize(self) -> None:
        """Acquire resources (connections, caches) before first use."""
        pass

    async def shutdown(self) -> None:
        """Release resources held by the service."""
        pass

    def log_debug(self, message: str, **kwargs: Any) -> None:
        self.logger.debug(message, extra=kwargs)

    def log_info(self, message: str, **kwargs: Any) -> None:
        """Log an info message with optional context."""
        self.logger.info(message, extra=kwargs)

    def log_warning(self, message: str, **kwargs: Any) -> None:
        self.logger.warning(message, extra=kwargs)

    def log_error(self, message: str, **kwargs: Any) -> None:
        """Log an error message with optional context."""
        self.logger.error(message, extra=kwargs)
