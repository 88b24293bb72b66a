import logging
import sys
from datetime import datetime, timezone
from typing import Any, Dict
from pythonjsonlogger import jsonlogger
from contextvars import ContextVar

# One id per CLI invocation, attached to every record
run_id_var: ContextVar[str] = ContextVar("run_id", default="")


class CustomJsonFormatter(jsonlogger.JsonFormatter):
    def add_fields(self, log_record: Dict[str, Any], record: logging.LogRecord, message_dict: Dict[str, Any]) -> None:
        super(CustomJsonFormatter, self).add_fields(log_record, record, message_dict)

        run_id = run_id_var.get()
        if run_id:
            log_record["run_id"] = run_id

        if not log_record.get("timestamp"):
            log_record["timestamp"] = datetime.now(timezone.utc).isoformat()

        if log_record.get("level"):
            log_record["level"] = log_record["level"].upper()
        else:
            log_record["level"] = record.levelname


def setup_logging(level: str = "INFO") -> None:
    """Route all package logs as JSON lines to stderr; stdout carries artifacts only."""
    logger = logging.getLogger()
    for handler in list(logger.handlers):
        if getattr(handler, "_singkit", False):
            logger.removeHandler(handler)
    log_handler = logging.StreamHandler(sys.stderr)
    log_handler._singkit = True
    log_handler.setFormatter(CustomJsonFormatter("%(timestamp) %(level) %(name) %(message)"))
    logger.addHandler(log_handler)
    logger.setLevel(level.upper())

    logging.getLogger("diskcache").setLevel(logging.WARNING)
