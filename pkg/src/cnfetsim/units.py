"""Quantity parsing and formatting for netlists, parameter files and CLI flags.

Accepts bare floats, SPICE-style magnitude suffixes (case-insensitive
``f p n u m k meg``) and explicit unit forms with a case-sensitive prefix
(``2.1fF``, ``32nm``, ``0.65V``, ``250MHz``, ``40pF/m``).
"""

from __future__ import annotations

import re

__all__ = ["QuantityError", "parse_quantity", "format_quantity"]


class QuantityError(ValueError):
    pass


_NUMBER_RE = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(.*)$")

# SPICE bare magnitude suffixes, case-insensitive.
_BARE_SUFFIX = {
    "f": 1e-15,
    "p": 1e-12,
    "n": 1e-9,
    "u": 1e-6,
    "m": 1e-3,
    "k": 1e3,
    "meg": 1e6,
}

# Case-sensitive prefixes used when an explicit unit name follows.
_UNIT_PREFIX = {
    "": 1.0,
    "f": 1e-15,
    "p": 1e-12,
    "n": 1e-9,
    "u": 1e-6,
    "m": 1e-3,
    "k": 1e3,
    "K": 1e3,
    "M": 1e6,
    "G": 1e9,
}

# Longest names first so "eV" is not read as prefix "e" + unit "V".
_UNITS = ["F/m", "eV", "Hz", "F", "V", "A", "m", "s", "W", "J"]


def parse_quantity(token: str) -> tuple[float, str]:
    """Parse a number-with-optional-unit token.

    Returns ``(value_in_SI, unit_name)`` where ``unit_name`` is ``""`` for a
    bare number or pure magnitude suffix.  Energy values keep eV as the unit
    scale of 1 (the parameter set stores energies in eV).
    """
    m = _NUMBER_RE.match(token.strip())
    if not m or not m.group(1):
        raise QuantityError(f"not a number: {token!r}")
    value = float(m.group(1))
    suffix = m.group(2).strip()
    if not suffix:
        return value, ""
    low = suffix.lower()
    if low in _BARE_SUFFIX:
        return value * _BARE_SUFFIX[low], ""
    for unit in _UNITS:
        if suffix.endswith(unit):
            prefix = suffix[: -len(unit)]
            if prefix in _UNIT_PREFIX:
                return value * _UNIT_PREFIX[prefix], unit
    raise QuantityError(f"unknown unit suffix {suffix!r} in {token!r}")


def _try_scaled(value: float, scale: float, unit: str) -> str | None:
    mant = value / scale
    # Only use the scaled form when it reparses to the exact same float,
    # so emit -> parse is the identity on canonical values.  Division
    # artifacts (99.99999999999999nm for 1e-07) fall back to a bare repr.
    if mant * scale == value and abs(mant) < 1e6 and len(repr(mant)) <= len(repr(value)) + 4:
        return repr(mant) + unit
    return None


def format_quantity(value: float, unit: str = "") -> str:
    """Format a value canonically; guaranteed to reparse to the same float."""
    if unit == "F":
        for scale, suf in ((1e-15, "fF"), (1e-12, "pF")):
            out = _try_scaled(value, scale, suf)
            if out is not None:
                return out
    elif unit == "m":
        out = _try_scaled(value, 1e-9, "nm")
        if out is not None:
            return out
    elif unit == "Hz":
        out = _try_scaled(value, 1e6, "MHz")
        if out is not None:
            return out
    elif unit == "V":
        out = _try_scaled(value, 1.0, "V")
        if out is not None:
            return out
    elif unit == "F/m":
        out = _try_scaled(value, 1e-12, "pF/m")
        if out is not None:
            return out
    elif unit == "eV":
        out = _try_scaled(value, 1.0, "eV")
        if out is not None:
            return out
    return repr(value)
