import logging
import sys
from typing import Optional

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def configure_logging(level: str = "INFO", log_file: Optional[str] = None) -> logging.Logger:
    """
    Configures the root logger with a console handler on stderr and, when
    ``log_file`` is given, a UTF-8 file handler. stdout stays free for reports.

    Args:
        level (str): Logging level name.
        log_file (Optional[str]): Path of the log file, if any.

    Returns:
        logging.Logger: The configured root logger.
    """
    formatter = logging.Formatter(LOG_FORMAT)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    handlers = [console_handler]

    if log_file:
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setFormatter(formatter)
        handlers.append(file_handler)

    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO),
                        handlers=handlers,
                        force=True)
    return logging.getLogger()
