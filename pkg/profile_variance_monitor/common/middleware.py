import uuid
from collections.abc import Callable
from contextvars import ContextVar
from functools import wraps

from profile_variance_monitor.common.logging import StructuredLogger

logger = StructuredLogger(__name__)

# Run ID shared by every log line and output header of one CLI invocation
run_id_context: ContextVar[str] = ContextVar("run_id", default="")

UNHANDLED_ERROR_EXIT_CODE = 1


def with_run_id(handler: Callable[..., int]) -> Callable[..., int]:
    """
    Wraps a command handler so that a run ID is available throughout the
    command's lifetime through the context variable.

    An ID already present in the context (set by a caller) is kept.
    """

    @wraps(handler)
    def wrapper(*args, **kwargs) -> int:
        token = None
        if not run_id_context.get(""):
            token = run_id_context.set(uuid.uuid4().hex[:12])
        try:
            return handler(*args, **kwargs)
        finally:
            if token is not None:
                run_id_context.reset(token)

    return wrapper


def error_handling(handler: Callable[..., int]) -> Callable[..., int]:
    """
    Catches any exception that escapes a command handler, logs the error
    details, and converts it into the generic failure exit code.
    """

    @wraps(handler)
    def wrapper(*args, **kwargs) -> int:
        try:
            return handler(*args, **kwargs)
        except Exception as exc:
            logger.error(
                "unhandled_exception",
                command=handler.__name__,
                error=str(exc),
                error_type=type(exc).__name__,
                exc_info=True,
            )
            return UNHANDLED_ERROR_EXIT_CODE

    return wrapper
