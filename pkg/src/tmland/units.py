"""Unit conventions and conversions.

All frequencies and rates are stored internally as angular values in rad/s;
all times are in seconds.  User-facing values (CLI flags, parameter files,
CSV columns) are quoted as nu = omega/2pi in GHz or MHz, and durations in ns.
This module is the only place where units are converted.
"""

import math
import re

TWO_PI = 2.0 * math.pi

#: 1 GHz of ordinary frequency, expressed as angular frequency in rad/s
GHZ = TWO_PI * 1e9
#: 1 MHz of ordinary frequency, expressed as angular frequency in rad/s
MHZ = TWO_PI * 1e6
#: 1 ns in seconds
NS = 1e-9

_FREQ_UNITS = {
    "GHz_2pi": GHZ,
    "MHz_2pi": MHZ,
    "rad_per_s": 1.0,
}


def freq_to_rad_per_s(value: float, unit: str) -> float:
    """Convert a frequency given as {value, unit} to angular rad/s."""
    try:
        return value * _FREQ_UNITS[unit]
    except KeyError:
        raise ValueError(
            "unknown frequency unit %r (expected one of %s)"
            % (unit, ", ".join(sorted(_FREQ_UNITS)))
        ) from None


def rad_per_s_to(value: float, unit: str) -> float:
    """Convert an angular frequency in rad/s to the given unit."""
    try:
        return value / _FREQ_UNITS[unit]
    except KeyError:
        raise ValueError(
            "unknown frequency unit %r (expected one of %s)"
            % (unit, ", ".join(sorted(_FREQ_UNITS)))
        ) from None


_DURATION_RX = re.compile(r"^\s*([-+0-9.eE]+)\s*(ns|us|s)?\s*$")
_DURATION_FACTORS = {"ns": 1e-9, "us": 1e-6, "s": 1.0, None: 1e-9}


def parse_duration(text: str) -> float:
    """Parse a duration like ``"50ns"``, ``"0.2us"`` or ``"50"`` (ns) to seconds."""
    m = _DURATION_RX.match(str(text))
    if m is None:
        raise ValueError("cannot parse duration %r" % (text,))
    return float(m.group(1)) * _DURATION_FACTORS[m.group(2)]


_FREQ_FLAG_RX = re.compile(r"^\s*([-+0-9.eE]+)\s*(GHz|MHz)\s*$")


def parse_frequency_flag(text: str) -> float:
    """Parse a CLI frequency like ``"5.9325GHz"`` or ``"70MHz"`` to rad/s.

    The suffix is mandatory; frequencies on flags are always nu = omega/2pi.
    """
    m = _FREQ_FLAG_RX.match(str(text))
    if m is None:
        raise ValueError(
            "cannot parse frequency %r (explicit GHz or MHz suffix required)"
            % (text,)
        )
    factor = GHZ if m.group(2) == "GHz" else MHZ
    return float(m.group(1)) * factor


def fmt(x: float) -> str:
    """Format a float at 17 significant digits (exact binary round-trip)."""
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.17g" % x
