"""
Exception types raised by the qde package.

All of them derive from ValueError so callers validating inputs the usual way
keep working.
"""

from typing import Iterable, Optional, Sequence, Tuple


class QDEError(ValueError):
    """Base class for every error raised by qde."""


class NearZeroQuaternion(QDEError):
    """Raised when an operation needs a direction from a (near) zero quaternion."""


class NonFiniteQuaternion(QDEError):
    """Raised when a NaN or infinite coefficient would be stored."""


class InvalidRange(QDEError):
    """Raised when a sampling range is empty or reversed."""


class UnsupportedDimension(QDEError):
    """Raised for dimensions that are neither 3 nor a multiple of 4."""


class UnknownFunction(QDEError):
    """Raised for benchmark ids outside 1..24."""


class DimensionMismatch(QDEError):
    """Raised when a point does not match the instance dimension."""


class EmptyCell(QDEError):
    """Raised when aggregating a cell without records."""


class DegenerateInput(QDEError):
    """Raised when a rank test gets fewer than two blocks or treatments."""


class UnsupportedAlpha(QDEError):
    """Raised for significance levels without an embedded q table."""


class KOutOfTable(QDEError):
    """Raised when the number of treatments exceeds the q table."""


class UnknownFormat(QDEError):
    """Raised for export formats other than csv and json."""


class UnknownStrategy(QDEError):
    """Raised for mutation strategy tags outside the valid set."""

    def __init__(self, value: str, valid: Sequence[str]):
        self.value = value
        self.valid = tuple(valid)
        super().__init__(f"Unknown strategy {value!r}; valid strategies: {', '.join(self.valid)}")


class IncompleteMatrix(QDEError):
    """Raised when an analysis needs cells that have no records."""

    def __init__(self, missing: Iterable[Tuple[str, int]]):
        self.missing = sorted(set(missing))
        shown = ', '.join(f"{alg}/f{fid}" for alg, fid in self.missing[:10])
        more = '' if len(self.missing) <= 10 else f" (+{len(self.missing) - 10} more)"
        super().__init__(f"Missing {len(self.missing)} cells: {shown}{more}")


class ConfigError(QDEError):
    """Raised for malformed experiment configuration, with the key path and line."""

    def __init__(self, message: str, key_path: str = '', line: Optional[int] = None):
        self.key_path = key_path
        self.line = line
        where = key_path or '<root>'
        if line is not None:
            where = f"{where} (line {line})"
        super().__init__(f"{where}: {message}")
