"""Tiny 1-D search helpers with absolute tolerances.

Library minimizers stop at a relative sqrt-epsilon floor, which is too
coarse for corner-shaped extremes (the map's iterates are only
one-sided differentiable at breakpoints).  Golden-section with an
absolute interval tolerance localizes those to machine precision.
"""

from __future__ import annotations

import math
from typing import Callable

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_min(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    xtol: float = 1e-12,
) -> tuple[float, float]:
    """Minimize a unimodal f on [lo, hi] to an absolute interval width xtol."""
    a, b = lo, hi
    h = b - a
    c = b - _INV_PHI * h
    d = a + _INV_PHI * h
    fc, fd = f(c), f(d)
    while h > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            h = b - a
            c = b - _INV_PHI * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + _INV_PHI * h
            fd = f(d)
    x = c if fc < fd else d
    return x, min(fc, fd)
