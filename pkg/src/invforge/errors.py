"""Exception types and the global resource guard."""

import os

DEFAULT_MAX_AMBIENT = 10_000_000
DEFAULT_MAX_ROWS = 2_000_000


class InvforgeError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(InvforgeError):
    """Vectors or subspaces with incompatible ambient dimensions."""


class ShapeMismatchError(InvforgeError):
    """Polynomials or states living on different system shapes."""


class ModeError(InvforgeError):
    """Exact arithmetic requested on float-only data, or vice versa."""


class ResourceLimitError(InvforgeError):
    """A computation would exceed the configured ambient or row cap."""


class PurificationError(InvforgeError):
    """Purification impossible: ancilla too small or input not PSD."""


def max_ambient() -> int:
    raw = os.environ.get("INVFORGE_MAX_AMBIENT", "")
    return int(raw) if raw else DEFAULT_MAX_AMBIENT


def max_rows() -> int:
    raw = os.environ.get("INVFORGE_MAX_ROWS", "")
    return int(raw) if raw else DEFAULT_MAX_ROWS


def guard_ambient(dim: int, context: str = "") -> None:
    cap = max_ambient()
    if dim > cap:
        where = f" in {context}" if context else ""
        raise ResourceLimitError(
            f"ambient dimension {dim}{where} exceeds the guard {cap} "
            f"(raise INVFORGE_MAX_AMBIENT to allow)"
        )


def guard_rows(count: int, context: str = "") -> None:
    cap = max_rows()
    if count > cap:
        where = f" in {context}" if context else ""
        raise ResourceLimitError(
            f"row count {count}{where} exceeds the guard {cap} "
            f"(raise INVFORGE_MAX_ROWS to allow)"
        )
