import logging
from typing import Optional
from singkit.core.config import Config, settings


class BaseEngine:
    """Base class for the computation engines: shared settings and logging context."""

    def __init__(self, config: Optional[Config] = None):
        self._config = config or settings
        self._logger = logging.getLogger(f"singkit.services.{self.__class__.__name__}")

    @property
    def config(self) -> Config:
        return self._config

    def log_info(self, message: str, extra: Optional[dict] = None):
        self._logger.info(message, extra=extra)

    def log_error(self, message: str, extra: Optional[dict] = None):
        self._logger.error(message, extra=extra)

    def log_warning(self, message: str, extra: Optional[dict] = None):
        self._logger.warning(message, extra=extra)
