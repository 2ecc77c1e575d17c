import logging

from delaybounds.config import LOG_LEVEL

logger = logging.getLogger(__name__)


def configure_logging(level=None):
    """Install the stream handler used by the command-line front end."""
    logging.basicConfig(
        level=getattr(logging, (level or LOG_LEVEL).upper(), logging.INFO),
        format="%(asctime)s [%(levelname)s] %(message)s",
        handlers=[logging.StreamHandler()],
    )
    return logger
