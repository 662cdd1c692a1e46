from contextlib import contextmanager

from loguru import logger


# See https://loguru.readthedocs.io/en/latest/resources/migration.html#replacing-assertlogs-method-from-unittest-library
@contextmanager
def capture_logs(level="DEBUG", format="{level}:{name}:{message}"):
    """Capture loguru-based logs, e.g. to check which branch a decider took"""
    output = []
    handler_id = logger.add(output.append, level=level, format=format)
    try:
        yield output
    finally:
        logger.remove(handler_id)
