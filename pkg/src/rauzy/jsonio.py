"""JSON encoding where every real number carries its rounding direction.

A real ``x`` is written as ``{"value": x, "rounding": "up"|"down"|"nearest"}``;
non-finite values are written as the strings ``"inf"``, ``"-inf"``, ``"nan"``.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

_KEYS = {"value", "rounding"}


def annotate(x: float, rounding: str = "nearest") -> dict:
    x = float(x)
    return {"value": x if math.isfinite(x) else str(x), "rounding": rounding}


def is_annotated(obj) -> bool:
    return isinstance(obj, dict) and set(obj) == _KEYS


def encode(obj, rounding_for: Callable[[str | None], str] = lambda key: "nearest", key: str | None = None):
    """Annotate every float inside nested dicts/lists; the key names pick the direction."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return annotate(obj, rounding_for(key))
    if isinstance(obj, dict):
        return {k: encode(v, rounding_for, k) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v, rounding_for, key) for v in obj]
    return obj


def decode(obj):
    if is_annotated(obj):
        return float(obj["value"])
    if isinstance(obj, dict):
        return {k: decode(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [decode(v) for v in obj]
    return obj


def rounding_by_name(key: str | None) -> str:
    """Direction implied by conventional key names (upper/lhs/cost up, lower/rhs/slack down)."""
    if key is None:
        return "nearest"
    k = key.lower()
    if k in ("lhs", "cost", "cover_cost", "x_n", "ceiling_overhead") or "upper" in k:
        return "up"
    if k in ("rhs", "bound", "c_n", "c", "x_star") or "lower" in k or "slack" in k:
        return "down"
    return "nearest"
