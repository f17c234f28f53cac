"""Closed-form Brownian bridge probabilities.

All functions follow the below-barrier convention: "survival" means staying
at or below a level. Exponents below -745 are returned as probability 0
instead of relying on underflow of ``exp``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

_EXP_FLOOR = -745.0


def _exp(e):
    return 0.0 if e < _EXP_FLOOR else math.exp(e)


@dataclass(frozen=True)
class BridgeEndpoints:
    x0: float
    y_t: float
    t: float

    def __post_init__(self):
        if not self.t > 0:
            raise DomainError(f"bridge length must be positive, got {self.t}")


def ballot_survival(e: BridgeEndpoints) -> float:
    """P(max of the bridge from x0 to y_t over [0, t] stays <= 0).

    Zero if either endpoint is positive, else ``1 - exp(-2 x0^- y_t^- / t)``.
    """
    if e.x0 > 0 or e.y_t > 0:
        return 0.0
    return -math.expm1(-2.0 * (-e.x0) * (-e.y_t) / e.t)


def bridge_max_tail(z, s) -> float:
    """P(sup of a 0 -> 0 bridge of length s reaches z) = exp(-2 z^2 / s)."""
    if z < 0:
        raise DomainError(f"level must be non-negative, got {z}")
    if not s > 0:
        raise DomainError(f"bridge length must be positive, got {s}")
    return _exp(-2.0 * z * z / s)


def segment_crossing_prob(w0, w1, b0, b1, h) -> float:
    """Probability that a bridge of length h from w0 to w1 reaches the line b0 -> b1."""
    if not h > 0:
        raise DomainError(f"segment length must be positive, got {h}")
    if w0 >= b0 or w1 >= b1:
        return 1.0
    return _exp(-2.0 * (b0 - w0) * (b1 - w1) / h)


def bridge_marginal(e: BridgeEndpoints, r):
    """Mean and variance of the bridge at time r in (0, t)."""
    if not 0 < r < e.t:
        raise DomainError(f"marginal time must lie in (0, {e.t}), got {r}")
    mean = (e.x0 * (e.t - r) + e.y_t * r) / e.t
    return mean, r * (e.t - r) / e.t
