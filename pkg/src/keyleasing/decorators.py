import functools
from typing import Callable, Optional, TypeVar

T_OUT = TypeVar("T_OUT")


def make_bot_safe(
    func: Callable[..., T_OUT]
) -> Callable[..., Optional[T_OUT]]:
    """
    Make sure functions give ⊥ (None) if the first argument is ⊥
    """

    @functools.wraps(func)
    def bot_safe(arg, *args, **kwargs):
        if arg is None:
            return None
        else:
            return func(arg, *args, **kwargs)

    return bot_safe
