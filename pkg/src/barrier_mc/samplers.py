"""Exact samplers: Poisson arrivals, Brownian bridges and motions, decorations."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Union

import numba as nb
import numpy as np

from . import kernels
from .errors import ConfigurationError, DomainError
from .rng import RngStream


class Label(enum.Enum):
    """Tagged decoration label; ``LIMIT`` stands for u = infinity."""

    LIMIT = "inf"

    def __repr__(self):
        return "LIMIT"


LIMIT = Label.LIMIT


@dataclass(frozen=True)
class PppConfig:
    rate_lambda: float

    def __post_init__(self):
        if not (isinstance(self.rate_lambda, (int, float)) and self.rate_lambda > 0
                and math.isfinite(self.rate_lambda)):
            raise ConfigurationError(f"PPP rate must be positive, got {self.rate_lambda!r}",
                                     field="ppp.rate_lambda")


@dataclass(frozen=True)
class ArrivalTimes:
    horizon_t: float
    times: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        object.__setattr__(self, "times", times)
        if self.horizon_t < 0:
            raise DomainError(f"horizon must be non-negative, got {self.horizon_t}")
        if times.size and (times[0] <= 0 or times[-1] >= self.horizon_t
                           or np.any(np.diff(times) <= 0)):
            raise DomainError("arrival times must be strictly increasing inside (0, t)")

    def __len__(self):
        return self.times.size


@dataclass(frozen=True)
class Bridge:
    x0: float
    y_t: float
    t: float


@dataclass(frozen=True)
class Free:
    x0: float


@dataclass(frozen=True)
class PathSample:
    times: np.ndarray
    values: np.ndarray
    kind: Union[Bridge, Free]

    def __post_init__(self):
        if np.shape(self.times) != np.shape(self.values):
            raise DomainError("path times and values must have the same length")

    def __len__(self):
        return len(self.times)


def sample_ppp(cfg: PppConfig, horizon_t, rng: RngStream) -> ArrivalTimes:
    """Arrivals of a rate-``cfg.rate_lambda`` Poisson process on ``(0, horizon_t)``."""
    t = float(horizon_t)
    if not t >= 0:
        raise DomainError(f"horizon must be non-negative, got {horizon_t}")
    lam = cfg.rate_lambda
    chunk = max(16, int(lam * t + 5.0 * math.sqrt(lam * t) + 10))
    pieces = []
    last = 0.0
    while True:
        arr = last + np.cumsum(rng.exponential(chunk, lam))
        pieces.append(arr)
        if arr[-1] >= t:
            break
        last = arr[-1]
    times = np.concatenate(pieces)
    return ArrivalTimes(t, times[times < t])


def _check_sorted(times, name="times"):
    times = np.asarray(times, dtype=float)
    if times.ndim != 1:
        raise DomainError(f"{name} must be one-dimensional")
    if times.size > 1 and np.any(np.diff(times) < 0):
        raise DomainError(f"{name} must be sorted")
    return times


@nb.njit(cache=True)
def _bridge_recursion(x0, y, t, times, z):
    out = np.empty_like(z)
    for p in range(z.shape[0]):
        s_prev = 0.0
        w = x0
        for k in range(times.shape[0]):
            s = times[k]
            rem = t - s_prev
            dt = s - s_prev
            w = w + (y - w) * dt / rem + math.sqrt(dt * (t - s) / rem) * z[p, k]
            out[p, k] = w
            s_prev = s
    return out


def _bridge_checks(x0, y_t, t, times):
    t = float(t)
    times = _check_sorted(times)
    if t < 0:
        raise DomainError(f"bridge length must be non-negative, got {t}")
    if t == 0:
        if x0 != y_t:
            raise DomainError("a bridge of length 0 needs x0 == y_t")
        if times.size:
            raise DomainError("a bridge of length 0 has no interior times")
    elif times.size and (times[0] <= 0 or times[-1] >= t):
        raise DomainError("bridge times must lie strictly inside (0, t)")
    return t, times


def sample_bridge_paths(x0, y_t, horizon_t, times, rng: RngStream, n_paths: int) -> np.ndarray:
    """``n_paths`` bridge paths from x0 to y_t at ``times``, shape (n_paths, len(times)).

    Values are drawn sequentially: given ``w`` at the previous time, the next
    one is Gaussian with mean ``w + (y_t - w) dt / (t - s_prev)`` and variance
    ``dt (t - s) / (t - s_prev)``.
    """
    t, times = _bridge_checks(x0, y_t, horizon_t, times)
    if times.size == 0:
        return np.empty((int(n_paths), 0))
    z = rng.normal(int(n_paths) * times.size).reshape(int(n_paths), times.size)
    return _bridge_recursion(float(x0), float(y_t), t, times, z)


def sample_bridge(x0, y_t, horizon_t, times, rng: RngStream) -> PathSample:
    """One Brownian bridge from ``x0`` at 0 to ``y_t`` at ``horizon_t``, observed at ``times``."""
    t, times = _bridge_checks(x0, y_t, horizon_t, times)
    values = sample_bridge_paths(x0, y_t, t, times, rng, 1)[0]
    return PathSample(times, values, Bridge(float(x0), float(y_t), t))


def sample_bm_paths(x0, times, rng: RngStream, n_paths: int) -> np.ndarray:
    """``n_paths`` Brownian paths started at x0, shape (n_paths, len(times))."""
    times = _check_sorted(times)
    if times.size and times[0] <= 0:
        raise DomainError("Brownian motion times must be positive")
    if times.size == 0:
        return np.empty((int(n_paths), 0))
    dt = np.diff(np.concatenate([[0.0], times]))
    z = rng.normal(int(n_paths) * times.size).reshape(int(n_paths), times.size)
    return x0 + np.cumsum(z * np.sqrt(dt), axis=1)


def sample_bm(x0, times, rng: RngStream) -> PathSample:
    times = _check_sorted(times)
    values = sample_bm_paths(x0, times, rng, 1)[0]
    return PathSample(times, values, Free(float(x0)))


DECORATION_KINDS = ("zero", "two_sided_exponential", "limit_shifted", "custom_table")
_BASE_KINDS = ("zero", "two_sided_exponential", "custom_table")


@dataclass(frozen=True)
class DecorationFamily:
    """Law of the decorations ``Y_u``, ``u >= 0``, and of their limit ``Y_inf``.

    ``limit_shifted`` means ``Y_u = B + drift_scale * exp(-decay_rate * u)``
    with ``B`` drawn from ``base`` and ``Y_inf = B``. ``custom_table`` draws
    through a piecewise linear quantile function with equally spaced
    probability nodes. ``reflect_horizon`` relabels ``u -> horizon - u``.
    """

    kind: str
    tail_delta: float = 0.5
    rate: float = 1.0
    base: Optional["DecorationFamily"] = None
    drift_scale: float = 0.0
    decay_rate: float = 1.0
    quantiles: tuple = field(default=())
    reflect_horizon: Optional[float] = None

    def __post_init__(self):
        if self.kind not in DECORATION_KINDS:
            raise ConfigurationError(f"unknown decoration kind {self.kind!r}",
                                     field="decorations.kind")
        if not 0 < self.tail_delta <= 0.5:
            raise ConfigurationError(f"tail_delta must lie in (0, 1/2], got {self.tail_delta}",
                                     field="decorations.tail_delta")
        if self.kind == "two_sided_exponential" and not self.rate > 0:
            raise ConfigurationError("two-sided exponential rate must be positive",
                                     field="decorations.rate")
        if self.kind == "limit_shifted":
            if self.base is None or self.base.kind not in _BASE_KINDS:
                raise ConfigurationError("limit_shifted needs a u-independent base law",
                                         field="decorations.base")
            if self.decay_rate < 0:
                raise ConfigurationError("decay_rate must be non-negative",
                                         field="decorations.decay_rate")
        if self.kind == "custom_table":
            q = np.asarray(self.quantiles, dtype=float)
            if q.size < 2 or np.any(np.diff(q) < 0) or not np.all(np.isfinite(q)):
                raise ConfigurationError("custom_table needs >= 2 non-decreasing quantile nodes",
                                         field="decorations.quantiles")
            object.__setattr__(self, "quantiles", tuple(float(v) for v in q))

    @classmethod
    def zero(cls, tail_delta=0.5):
        return cls("zero", tail_delta)

    @classmethod
    def two_sided_exponential(cls, rate=1.0, tail_delta=None):
        if tail_delta is None:
            tail_delta = min(float(rate), 0.5)
        return cls("two_sided_exponential", tail_delta, rate=float(rate))

    @classmethod
    def limit_shifted(cls, base, drift_scale, decay_rate, tail_delta=None):
        if tail_delta is None:
            tail_delta = base.tail_delta
        return cls("limit_shifted", tail_delta, base=base, drift_scale=float(drift_scale),
                   decay_rate=float(decay_rate))

    @classmethod
    def custom_table(cls, quantiles, tail_delta=0.5):
        return cls("custom_table", tail_delta, quantiles=tuple(quantiles))

    def limit_law(self) -> "DecorationFamily":
        """The family whose every member has the law of ``Y_inf``."""
        if self.kind == "limit_shifted":
            return self.base
        return replace(self, reflect_horizon=None)

    def reflected(self, horizon):
        """Family relabelled by ``u -> horizon - u``."""
        return replace(self, reflect_horizon=float(horizon))

    def describe(self):
        if self.kind == "zero":
            return "zero"
        if self.kind == "two_sided_exponential":
            return f"two_sided_exponential({self.rate:g})"
        if self.kind == "limit_shifted":
            return (f"limit_shifted({self.base.describe()}, {self.drift_scale:g}, "
                    f"{self.decay_rate:g})")
        return f"custom_table({len(self.quantiles)} nodes)"

    def _shift(self, u):
        if self.kind != "limit_shifted" or u is LIMIT:
            return 0.0
        lab = self.reflect_horizon - u if self.reflect_horizon is not None else u
        return self.drift_scale * math.exp(-self.decay_rate * lab)

    def _base_cdf(self, v):
        fam = self.base if self.kind == "limit_shifted" else self
        v = np.asarray(v, dtype=float)
        if fam.kind == "zero":
            return (v >= 0).astype(float)
        if fam.kind == "two_sided_exponential":
            return np.where(v < 0, 0.5 * np.exp(fam.rate * np.minimum(v, 0)),
                            1.0 - 0.5 * np.exp(-fam.rate * np.maximum(v, 0)))
        q = np.asarray(fam.quantiles)
        probs = np.linspace(0.0, 1.0, q.size)
        q_u, idx = np.unique(q, return_index=True)
        if q_u.size == 1:
            return (v >= q_u[0]).astype(float)
        # right-continuous cdf of the piecewise linear quantile function
        last = np.searchsorted(q, q_u, side="right") - 1
        return np.interp(v, q_u, probs[last], left=0.0, right=1.0)

    def tail_probability(self, z, u=0.0):
        """P(|Y_u| >= z) for z > 0 (``u`` may be ``LIMIT``)."""
        z = np.asarray(z, dtype=float)
        d = self._shift(u)
        base = self.base if self.kind == "limit_shifted" else self
        if base.kind == "zero":
            out = (abs(d) >= z).astype(float)
        else:
            # continuous law: P(B >= z - d) + P(B <= -z - d)
            out = 1.0 - self._base_cdf(z - d) + self._base_cdf(-z - d)
        return np.minimum(out, 1.0)

    def satisfies_tail_bound(self, z_grid=None, labels=(0.0, 1.0, 10.0, 100.0, LIMIT)):
        """Check ``P(|Y_u| >= z) <= exp(-delta z) / delta`` on a grid.

        Returns ``(ok, violation)`` with the first failing ``(u, z)``.
        """
        z_grid = np.linspace(0.0, 60.0, 601)[1:] if z_grid is None else np.asarray(z_grid, float)
        bound = np.exp(-self.tail_delta * z_grid) / self.tail_delta
        for u in labels:
            bad = self.tail_probability(z_grid, u) > bound * (1 + 1e-12)
            if np.any(bad):
                return False, (u, float(z_grid[np.argmax(bad)]))
        return True, None


def encode_decorations(fam: DecorationFamily):
    """Float parameter array and quantile table for the kernels' ``deco_draw``."""
    codes = {"zero": kernels.ZERO, "two_sided_exponential": kernels.LAPLACE,
             "limit_shifted": kernels.LIMIT_SHIFTED, "custom_table": kernels.QUANTILE_TABLE}
    if fam.kind not in codes:
        raise ConfigurationError(f"unknown decoration kind {fam.kind!r}", field="decorations.kind")
    base = fam.base if fam.kind == "limit_shifted" else fam
    dp = np.zeros(kernels.DECO_PARAMS)
    dp[0] = codes[fam.kind]
    dp[1] = codes[base.kind]
    dp[2] = base.rate
    dp[3] = fam.drift_scale
    dp[4] = fam.decay_rate
    dp[5] = 1.0 if fam.reflect_horizon is not None else 0.0
    dp[6] = fam.reflect_horizon or 0.0
    tab = np.asarray(base.quantiles, dtype=float) if base.kind == "custom_table" else np.zeros(1)
    return dp, tab


@nb.njit(cache=True)
def _draw_many(dp, dtab, labels, at_limit, u):
    out = np.empty(u.shape[0])
    for i in range(u.shape[0]):
        out[i] = kernels.deco_draw(dp, dtab, labels[i], at_limit[i], u[i])
    return out


def sample_decorations(fam: DecorationFamily, labels: Sequence, rng: RngStream) -> np.ndarray:
    """Independent decorations, one per label; ``LIMIT`` labels draw from ``Y_inf``."""
    dp, dtab = encode_decorations(fam)
    at_limit = np.array([lab is LIMIT for lab in labels], dtype=np.bool_)
    vals = []
    for lab in labels:
        if lab is LIMIT:
            vals.append(0.0)
            continue
        if isinstance(lab, (bool, Label)) or not isinstance(lab, (int, float, np.floating, np.integer)):
            raise DomainError(f"decoration labels must be reals >= 0 or LIMIT, got {lab!r}")
        if not lab >= 0 or not math.isfinite(lab):
            raise DomainError(f"decoration labels must be finite and >= 0, got {lab!r}")
        vals.append(float(lab))
    labels_arr = np.asarray(vals, dtype=float)
    u = rng.uniform(labels_arr.size)
    return _draw_many(dp, dtab, labels_arr, at_limit, u)
