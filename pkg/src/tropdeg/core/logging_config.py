"""Logging for tropdeg commands.

All package loggers hang below ``tropdeg`` and share one ``ClickHandler``.
Warnings raised through the :mod:`warnings` module (numpy overflow, scipy
``OptimizeWarning`` from the polytope oracle) are captured and routed through
the same handler, so ``-q`` silences them along with everything else.
"""

import logging

import click

PACKAGE = "tropdeg"

# indexed by min(verbosity, 2)
FORMATS = (
    "%(levelname)s: %(message)s",
    "%(asctime)s %(name)s %(levelname)s: %(message)s",
    "%(asctime)s %(name)s %(levelname)s %(filename)s:%(lineno)d: %(message)s",
)
LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)

logger = logging.getLogger(PACKAGE)


class ClickHandler(logging.Handler):
    """Logging handler that writes through click.echo.

    Records at WARNING and above go to stderr so that ``--json`` output on
    stdout stays parseable.
    """

    COLORS = {
        logging.DEBUG: "cyan",
        logging.WARNING: "yellow",
        logging.ERROR: "red",
        logging.CRITICAL: "bright_red",
    }

    def emit(self, record: logging.LogRecord) -> None:
        try:
            msg = self.format(record)
            color = self.COLORS.get(record.levelno)
            if color:
                msg = click.style(msg, fg=color)
            click.echo(msg, err=record.levelno >= logging.WARNING)
        except (OSError, ValueError):
            self.handleError(record)


def setup_logging(verbosity: int = 0, quiet: bool = False) -> None:
    """Configure the package logger for one CLI invocation.

    Args:
        verbosity: Number of ``-v`` flags (0 warnings, 1 milestones, 2+ per-facet detail).
        quiet: Only errors; wins over ``verbosity``.
    """
    step = min(max(verbosity, 0), 2)
    level = logging.ERROR if quiet else LEVELS[step]

    handler = ClickHandler()
    handler.setFormatter(logging.Formatter(FORMATS[step]))

    logger.handlers.clear()
    logger.addHandler(handler)
    logger.setLevel(level)

    logging.captureWarnings(True)
    captured = logging.getLogger("py.warnings")
    captured.handlers.clear()
    captured.addHandler(handler)
    captured.setLevel(level)
    captured.propagate = False


def get_logger(name: str | None = None) -> logging.Logger:
    """Return ``tropdeg.<name>``, or the package logger when ``name`` is None."""
    if name is None:
        return logger
    return logging.getLogger(f"{PACKAGE}.{name}")
