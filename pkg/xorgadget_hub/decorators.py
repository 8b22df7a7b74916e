"""
Decorators for the gadget compiler.
This module implements logging and other decorators.
"""

import functools
from datetime import datetime
from typing import Callable, Any

from xorgadget_hub.logging_config import logger


def _describe_subject(args: tuple, kwargs: dict) -> str:
    """Short label for the object an action works on"""
    candidates = list(args[1:2]) + [kwargs[key] for key in ("path", "name", "spec") if key in kwargs]
    for candidate in candidates:
        if isinstance(candidate, (str, int)):
            return str(candidate)
        label = getattr(candidate, "name", None)
        if isinstance(label, str):
            return label
    return "-"


def log_action(action_name: str):
    """
    Decorator for logging pipeline actions.

    Args:
        action_name (str): Name of the action being performed
    """
    def decorator(func: Callable) -> Callable:
        @functools.wraps(func)
        def wrapper(*args, **kwargs) -> Any:
            subject = _describe_subject(args, kwargs)

            start_time = datetime.now()
            logger.info(f"[{subject}] Starting {action_name}")

            try:
                result = func(*args, **kwargs)
                duration = (datetime.now() - start_time).total_seconds()
                logger.info(f"[{subject}] Completed {action_name} in {duration:.2f}s")
                return result
            except Exception as e:
                duration = (datetime.now() - start_time).total_seconds()
                logger.error(f"[{subject}] Error in {action_name} after {duration:.2f}s: {str(e)}")
                raise

        return wrapper
    return decorator
