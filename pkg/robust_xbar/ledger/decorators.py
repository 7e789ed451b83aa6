"""Function decorator recording library operations in the ledger."""

import functools
import inspect
import logging
from typing import Any, Callable, Dict, Optional, TypeVar, cast

from robust_xbar.ledger.span import LedgerStep

logger = logging.getLogger("robust_xbar.ledger")

F = TypeVar("F", bound=Callable[..., Any])


def _bound_params(func: Callable[..., Any], args: tuple, kwargs: dict) -> Dict[str, Any]:
    try:
        bound = inspect.signature(func).bind_partial(*args, **kwargs)
    except TypeError:
        return {"args": args, "kwargs": kwargs}
    return dict(bound.arguments)


def recorded(
    func: Optional[F] = None,
    name: Optional[str] = None,
    record_params: bool = True,
) -> Any:
    """
    Decorator recording each call of a function as a ledger step.

    Can be used directly as ``@recorded`` or with parameters as
    ``@recorded(name=...)``. Parameters are stored in summarised JSON-safe
    form; results are not stored (callers attach artifacts when they
    want a result kept).

    Args:
        func: Function to decorate (automatically provided when used as @recorded)
        name: Step name (defaults to the function's qualified name)
        record_params: Whether to record the call's parameters

    Returns:
        Decorated function
    """
    if func is None:
        def decorator(f: F) -> F:
            return cast(F, recorded(f, name=name, record_params=record_params))

        return decorator

    step_name = name or f"{func.__module__}.{func.__qualname__}"

    @functools.wraps(func)
    def wrapped(*args: Any, **kwargs: Any) -> Any:
        attributes = _bound_params(func, args, kwargs) if record_params else None
        with LedgerStep(step_name, attributes=attributes):
            return func(*args, **kwargs)

    return wrapped
