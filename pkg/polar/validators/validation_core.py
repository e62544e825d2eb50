"""
Shared validation primitives used by the run-config validators.

Every message starts with the dotted config key so the command error points
straight at the offending line.
"""

import math

from django.core.exceptions import ValidationError
from loguru import logger


def _fail(key: str, message: str):
    logger.error(f"Config validation failed: {key}: {message}")
    raise ValidationError(f"{key}: {message}")


def _require_mapping(value, key: str) -> dict:
    if value is None:
        return {}
    if not isinstance(value, dict):
        _fail(key, "must be a mapping")
    return value


def _validate_int(value, key: str, *, minimum: int | None = None, maximum: int | None = None) -> int:
    """Accept true integers only (YAML booleans and floats are rejected)."""
    logger.debug(f"Validating integer {key}")
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(key, f"must be an integer, got {value!r}")
    if minimum is not None and value < minimum:
        _fail(key, f"must be at least {minimum}, got {value}")
    if maximum is not None and value > maximum:
        _fail(key, f"must be at most {maximum}, got {value}")
    return value


def _validate_float(value, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, int | float):
        _fail(key, f"must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        _fail(key, "must be finite")
    return value


def _validate_open_interval(value, key: str, low: float, high: float) -> float:
    value = _validate_float(value, key)
    if not low < value < high:
        _fail(key, f"must lie in ({low!r}, {high!r}), got {value!r}")
    return value


def _validate_bool(value, key: str) -> bool:
    if not isinstance(value, bool):
        _fail(key, f"must be true or false, got {value!r}")
    return value


def _validate_choice(value, key: str, choices) -> str:
    raw = str(value).strip().lower() if value is not None else ""
    allowed = [str(c) for c in choices]
    if raw not in allowed:
        _fail(key, f"must be one of {', '.join(allowed)}, got {value!r}")
    return raw


def _validate_power_of_two(value, key: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 2 or value & (value - 1):
        _fail(key, "N must be a power of two")
    return value


def _reject_unknown(section: dict, key: str, known) -> None:
    unknown = sorted(set(section) - set(known))
    if unknown:
        _fail(f"{key}.{unknown[0]}" if key else unknown[0], "unknown key")
