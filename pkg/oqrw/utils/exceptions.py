import logging
import traceback

from oqrw.exceptions import FileFormatError, NormalizationError, OQRWError, StructuralError

logger = logging.getLogger(__name__)

# Exit status of errors raised outside the library (missing files, bad YAML).
EXIT_USAGE = 2


def error_exit_code(exception: Exception) -> int:
    if isinstance(exception, OQRWError):
        return exception.exit_code
    if isinstance(exception, (FileNotFoundError, ValueError)):
        return EXIT_USAGE
    return 1


def make_error_response(exception: Exception, message: str | None = None) -> dict:
    """
    Machine-readable record of a failed command.

    Always carries ``status``, ``message``, ``exception`` and ``exit_code``;
    the offending ``location``, site ``pair`` or per-site ``residuals`` are
    added when the exception knows them. The traceback is only included
    when debug logging is on.
    """
    response = {
        "status": False,
        "message": message or str(exception),
        "exception": exception.__class__.__name__,
        "exit_code": error_exit_code(exception),
    }

    if isinstance(exception, FileFormatError) and exception.location:
        response["location"] = exception.location
    if isinstance(exception, StructuralError) and exception.pair is not None:
        response["pair"] = list(exception.pair)
    if isinstance(exception, NormalizationError) and exception.residuals:
        response["residuals"] = {str(site): r for site, r in sorted(exception.residuals.items())}

    if logger.isEnabledFor(logging.DEBUG):
        response["traceback"] = traceback.format_exception(exception)
    logger.debug(f"error response for {response['exception']} (exit {response['exit_code']})")
    return response
