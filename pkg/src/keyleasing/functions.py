from functools import lru_cache
from logging import Logger
from typing import Any

from .exceptions import WidthMismatch


def raise_exception_if_width_differs(obj: Any, width: int, what: str = "value") -> None:
    """
    Raise an exception if the bit string does not have the required width

    Raises: WidthMismatch
    """
    actual = getattr(obj, "width", None)
    if actual != width:
        raise WidthMismatch(
            f"The {what} '{obj}' has width {actual} but width {width} is required"
        )


@lru_cache(20)
def warn_once(logger: Logger, msg: str):
    logger.warning(msg)
