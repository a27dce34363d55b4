"""Shaping potential and the temporal-difference step reward."""
from __future__ import annotations

import math

# Landed-bonus weight per zone name; red beats green, everything else earns nothing.
_BONUS = {"Red": 2.0, "Green": 1.0}


def shaping(position, velocity, action, c: float = 0.0) -> float:
    """Score a post-step snapshot.

    ``-100|p| - 10|v| - |a| + 10 c (1 - |a_x|) + 10 c (1 - |a_y|)`` where ``c``
    is the landed bonus weight (zero unless the drone is on the pad).
    """
    p_x, p_y, p_z = (float(x) for x in position)
    v_x, v_y, v_z = (float(x) for x in velocity)
    a_x, a_y = (float(x) for x in action)
    c = float(c)
    values = (p_x, p_y, p_z, v_x, v_y, v_z, a_x, a_y, c)
    if not all(math.isfinite(x) for x in values):
        raise ValueError(f"non-finite shaping input: {values}")
    return (
        -100.0 * math.hypot(p_x, p_y, p_z)
        - 10.0 * math.hypot(v_x, v_y, v_z)
        - math.hypot(a_x, a_y)
        + 10.0 * c * (1.0 - abs(a_x))
        + 10.0 * c * (1.0 - abs(a_y))
    )


def step_reward(shaping_t: float, shaping_prev: float) -> float:
    return shaping_t - shaping_prev


def landed_bonus(zone) -> float:
    """Bonus weight ``C`` for a terminal zone (enum or its string value)."""
    return _BONUS.get(getattr(zone, "value", zone), 0.0)
