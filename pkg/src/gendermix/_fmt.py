"""Deterministic number formatting shared by report writers.

All emitted floats carry 12 significant digits so repeated runs with the
same inputs produce byte-identical files.
"""

import json
import math

SIG_DIGITS = 12


def fmt_float(value) -> str:
    """Render a number for CSV output; None becomes the empty string."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if math.isnan(value):
        return "nan"
    return format(value, f".{SIG_DIGITS}g")


def round_for_json(value):
    """Recursively round floats to 12 significant digits; NaN becomes null."""
    if isinstance(value, dict):
        return {k: round_for_json(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_for_json(v) for v in value]
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float):
        if math.isnan(value):
            return None
        if math.isinf(value):
            # JSON has no Infinity literal; alpha is inf for all-female groups.
            return "inf" if value > 0 else "-inf"
        return float(format(value, f".{SIG_DIGITS}g"))
    return value


def dump_json(obj) -> str:
    """Serialize to stable JSON text (sorted keys, trailing newline)."""
    return json.dumps(round_for_json(obj), indent=2, sort_keys=True) + "\n"
