# run.py
import sys

from src.cli import main
from src.logging_config import logger

if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        logger.info("Shutdown requested by user")
        sys.exit(130)
    except Exception as e:
        logger.critical(f"Run crashed: {e}")
        raise
