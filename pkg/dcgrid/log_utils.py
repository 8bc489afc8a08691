# coding=utf-8
import logging

CLI_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def get_default_logger(name):
    """Get a logger from default logging manager. If no handler
    is associated, add a default NullHandler"""

    logger = logging.getLogger(name)
    if not logger.hasHandlers():
        # The library stays silent unless the application configures logging;
        # this also keeps records away from the 'lastResort' stderr handler.
        logger.addHandler(logging.NullHandler())
    return logger


def verbosity_to_level(verbose=0, quiet=False):
    """
    >>> verbosity_to_level()
    30
    >>> verbosity_to_level(verbose=1)
    20
    >>> verbosity_to_level(verbose=2)
    10
    >>> verbosity_to_level(quiet=True)
    40
    """
    if quiet:
        return logging.ERROR
    if verbose >= 2:
        return logging.DEBUG
    if verbose == 1:
        return logging.INFO
    return logging.WARNING


def configure_cli_logging(verbose=0, quiet=False, stream=None):
    """Route the package loggers to stderr for command line use."""
    level = verbosity_to_level(verbose=verbose, quiet=quiet)
    logging.basicConfig(level=level, format=CLI_FORMAT, stream=stream)
    logging.getLogger("dcgrid").setLevel(level)
    return level
