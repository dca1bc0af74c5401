import logging

from logger import LOG_FORMAT, get_logger


def test_module_logger_defaults():
    """
    A module logger gets one stream handler with the shared format and the default level.
    """
    logger = get_logger("orthonet.tests.defaults")
    assert logger.name == "orthonet.tests.defaults"
    assert logger.level == logging.INFO
    assert len(logger.handlers) == 1
    handler = logger.handlers[0]
    assert isinstance(handler, logging.StreamHandler)
    assert handler.formatter._fmt == LOG_FORMAT
    assert "%(levelname)s" in LOG_FORMAT


def test_logger_does_not_stack_handlers():
    """
    Repeated lookups reuse the handler and apply the requested level to it.
    """
    logger = get_logger("orthonet.tests.repeated", logging.DEBUG)
    again = get_logger("orthonet.tests.repeated", logging.WARNING)
    assert logger is again
    assert len(again.handlers) == 1
    assert again.level == logging.WARNING
    assert again.handlers[0].level == logging.WARNING
    assert not again.propagate
