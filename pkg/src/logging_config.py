# src/logging_config.py
import sys
from pathlib import Path
from loguru import logger

from src.config import settings


def configure_logging(level: str | None = None, log_dir: Path | None = None) -> None:
    """Installs the console sink and, if a directory is given, the JSONL sink."""
    level = (level or settings.log_level).upper()
    log_dir = log_dir if log_dir is not None else settings.log_dir

    # Remove default handler
    logger.remove()

    # Pretty console; stdout is reserved for CSV output
    logger.add(
        sys.stderr,
        format="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level}</level> | <cyan>{name}</cyan>:<cyan>{function}</cyan> | <level>{message}</level>",
        level=level,
        colorize=True,
    )

    # JSON logs for batch runs
    if log_dir is not None:
        logger.add(
            str(Path(log_dir) / "louvain_{time:YYYYMMDD}.jsonl"),
            rotation="7 days",
            retention="30 days",
            compression="zip",
            serialize=True,
            level="DEBUG",
        )


configure_logging()
