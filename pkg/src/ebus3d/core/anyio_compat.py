"""
Exception-group compatibility for anyio task groups.

Worker failures inside a task group surface as (possibly nested) exception
groups. The helpers here detect the group types available on this
interpreter and pull the original error back out so the CLI can map it onto
an exit code.
"""

import sys
from typing import Iterator, Optional, Tuple, Type

HAS_NATIVE_EXCEPTION_GROUPS = sys.version_info >= (3, 11)

if HAS_NATIVE_EXCEPTION_GROUPS:
    import builtins

    ExceptionGroup = getattr(builtins, "ExceptionGroup")
    BaseExceptionGroup = getattr(builtins, "BaseExceptionGroup")
else:
    from exceptiongroup import BaseExceptionGroup, ExceptionGroup


def get_exception_group_types() -> Tuple[Type[BaseException], ...]:
    """Exception types a task group may raise."""
    return (ExceptionGroup, BaseExceptionGroup)


def iter_leaf_exceptions(exc: BaseException) -> Iterator[BaseException]:
    """Yield the non-group exceptions inside a (nested) group, depth first."""
    if isinstance(exc, get_exception_group_types()):
        for inner in exc.exceptions:
            yield from iter_leaf_exceptions(inner)
    else:
        yield exc


def first_leaf_exception(exc: BaseException, prefer: Tuple[Type[BaseException], ...] = ()) -> BaseException:
    """Return the first leaf of preferred type, else the first leaf at all."""
    leaves = list(iter_leaf_exceptions(exc))
    if not leaves:
        return exc
    preferred: Optional[BaseException] = next((e for e in leaves if isinstance(e, prefer)), None)
    return preferred if preferred is not None else leaves[0]


__all__ = [
    "HAS_NATIVE_EXCEPTION_GROUPS",
    "ExceptionGroup",
    "BaseExceptionGroup",
    "get_exception_group_types",
    "iter_leaf_exceptions",
    "first_leaf_exception",
]
