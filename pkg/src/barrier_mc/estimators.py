"""Monte Carlo estimators for barrier survival, its limit functionals and
the repulsion, continuity and monotonicity experiments.

Every estimator draws replica ``i`` from lane ``i + 1`` of the Philox stream
``(master_seed, role)``, where ``role`` is one of :class:`Stream`. Estimates
are therefore reproducible from the configuration and the seed alone, and
do not change with the number of worker threads.
"""
from __future__ import annotations

import contextlib
import enum
import math
import time
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numba
import numpy as np

from . import kernels
from .curves import (CurveSpec, encode_curve, encode_limit, eval_curve, validate_envelope,
                     validate_regularity)
from .errors import ConfigurationError, DomainError
from .oracles import BridgeEndpoints
from .rng import RngStream, split_seed
from .samplers import (Bridge, DecorationFamily, PathSample, PppConfig, encode_decorations,
                       sample_bridge, sample_decorations, sample_ppp)
from .stats import ls_slope, mean_and_se, product_se, ratio_of_means

DEFAULT_SEED = 0x2545F4914F6CDD1D
MIN_SAMPLES = 1000


class Stream(enum.IntEnum):
    """Philox stream id used by each estimator role."""

    SURVIVAL = 0
    START_SIDE = 1
    END_SIDE = 2
    REPULSION = 3
    PAIRED = 4
    CROSSING = 5
    REFERENCE = 6


class Verdict(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"
    NA = "N/A"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class BarrierExperiment:
    """Bridge from ``x`` to ``y`` on ``[0, horizon_t]`` observed at PPP arrivals.

    ``horizon_t`` may be omitted for runs that only use the limit
    functionals, where ``x`` and ``y`` are ignored as well.
    """

    ppp: PppConfig
    curve: CurveSpec
    decorations: DecorationFamily
    x: float = 0.0
    y: float = 0.0
    horizon_t: Optional[float] = None

    def __post_init__(self):
        if self.horizon_t is not None and not self.horizon_t > 0:
            raise ConfigurationError(f"horizon must be positive, got {self.horizon_t}", field="t")

    @property
    def endpoints(self):
        return BridgeEndpoints(self.x, self.y, self._t())

    def _t(self):
        if self.horizon_t is None:
            raise ConfigurationError("this estimator needs a horizon t", field="t")
        return float(self.horizon_t)

    def at(self, x=None, y=None, t=None):
        """Copy with some of the endpoints or the horizon replaced."""
        return replace(self, x=self.x if x is None else float(x),
                       y=self.y if y is None else float(y),
                       horizon_t=self.horizon_t if t is None else float(t))

    def time_reversed(self):
        """The experiment seen backwards: (y, x, u -> gamma_{t,t-u}, u -> Y_{t-u})."""
        t = self._t()
        deco = self.decorations
        if deco.reflect_horizon is not None:
            deco = replace(deco, reflect_horizon=None)
        else:
            deco = deco.reflected(t)
        return replace(self, x=self.y, y=self.x, curve=self.curve.reflected(), decorations=deco)


@dataclass(frozen=True)
class Estimate:
    value: float
    std_error: float
    n_samples: int
    master_seed: int
    wall_time: float = 0.0
    workers: int = 1

    def ci(self, z=3.0):
        return self.value - z * self.std_error, self.value + z * self.std_error


@dataclass(frozen=True)
class FgSide:
    side: str
    s_horizon: float
    x_start: float

    def __post_init__(self):
        if self.side not in ("start", "end"):
            raise ConfigurationError(f"side must be 'start' or 'end', got {self.side!r}",
                                     field="side")
        if not self.s_horizon > 0:
            raise DomainError(f"s must be positive, got {self.s_horizon}")


@dataclass(frozen=True)
class RepulsionConfig:
    """``max over [s, t-s] of W - gamma >= -M``, evaluated on arrivals plus a
    grid of step ``grid_step``; ``refine`` subdivides each grid step for the
    discretization check."""

    M: float
    s_inner: float
    grid_step: float = 1.0
    refine: int = 1

    def __post_init__(self):
        if not self.M >= 1:
            raise ConfigurationError(f"M must be >= 1, got {self.M}", field="M")
        if not self.s_inner > 2:
            raise DomainError(f"s must exceed 2, got {self.s_inner}")
        if not 0 < self.grid_step <= 1:
            raise ConfigurationError(f"grid_step must lie in (0, 1], got {self.grid_step}",
                                     field="grid_step")
        if int(self.refine) != self.refine or self.refine < 1:
            raise ConfigurationError(f"refine must be a positive integer, got {self.refine}",
                                     field="refine")


@dataclass(frozen=True)
class RangeRegion:
    """``R_eps(t) = {x, y <= 1/eps, (x^- + 1)(y^- + 1) <= t^(1 - eps)}``."""

    epsilon: float = 0.1

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ConfigurationError(f"epsilon must be positive, got {self.epsilon}",
                                     field="epsilon")

    def contains(self, x, y, t):
        bound = 1.0 / self.epsilon
        return bool(x <= bound and y <= bound
                    and (max(-x, 0.0) + 1) * (max(-y, 0.0) + 1) <= t ** (1 - self.epsilon))

    def require(self, x, y, t):
        if not self.contains(x, y, t):
            raise ConfigurationError(
                f"(x, y) = ({x:g}, {y:g}) lies outside R_eps(t) for eps={self.epsilon:g}, t={t:g}",
                field="R_eps")


@contextlib.contextmanager
def _threads(workers):
    if isinstance(workers, bool) or int(workers) != workers or workers < 1:
        raise ConfigurationError(f"workers must be a positive integer, got {workers!r}",
                                 field="workers")
    old = numba.get_num_threads()
    numba.set_num_threads(min(int(workers), numba.config.NUMBA_NUM_THREADS))
    try:
        yield
    finally:
        numba.set_num_threads(old)


def _check_n(n, minimum=MIN_SAMPLES):
    if isinstance(n, bool) or int(n) != n or n < minimum:
        raise DomainError(f"need at least {minimum} samples, got {n}")
    return int(n)


def _estimate(samples, seed, started, workers):
    value, se = mean_and_se(samples)
    return Estimate(value, se, int(np.size(samples)), int(seed),
                    time.perf_counter() - started, int(workers))


def _require_envelope(curve, t):
    ok, bad = validate_envelope(curve, t)
    if not ok:
        raise ConfigurationError(
            f"curve {curve.describe()} leaves the growth envelope at u={bad[0]:g} "
            f"(value {bad[1]:g})", field="curve")


def indicator_Q(path: PathSample, curve: CurveSpec, decorations, window=None, horizon_t=None):
    """Whether every observation in ``window`` satisfies ``W <= gamma + Y``.

    Equality counts as survival. The horizon is read from bridge paths and
    must be passed for free paths.
    """
    dec = np.asarray(decorations, dtype=float)
    if dec.shape != np.shape(path.values):
        raise DomainError(f"{dec.size} decorations for {len(path)} observations")
    if horizon_t is None:
        if not isinstance(path.kind, Bridge):
            raise DomainError("free paths need an explicit horizon")
        horizon_t = path.kind.t
    u1, u2 = (0.0, horizon_t) if window is None else window
    times = np.asarray(path.times, dtype=float)
    sel = (times >= u1) & (times <= u2)
    if not np.any(sel):
        return True
    gamma = np.atleast_1d(eval_curve(curve, horizon_t, times[sel]))
    return bool(np.all(np.asarray(path.values)[sel] <= gamma + dec[sel]))


def survival_samples(exp: BarrierExperiment, n, master_seed=DEFAULT_SEED, window=None,
                     workers=1):
    """Per-replica survival indicators (uint8) of the fused kernel."""
    t = exp._t()
    _require_envelope(exp.curve, t)
    cp, ctab = encode_curve(exp.curve, t)
    dp, dtab = encode_decorations(exp.decorations)
    u1, u2 = (0.0, t) if window is None else (float(window[0]), float(window[1]))
    k0, k1 = split_seed(master_seed)
    with _threads(workers):
        return kernels.survival(int(n), k0, k1, np.uint64(Stream.SURVIVAL), float(exp.x),
                                float(exp.y), t, float(exp.ppp.rate_lambda), cp, ctab, dp, dtab,
                                u1, u2, 0)


def estimate_survival(exp: BarrierExperiment, n, workers=1, master_seed=DEFAULT_SEED,
                      window=None) -> Estimate:
    """Probability that the decorated observations stay below the curve.

    Each replica draws exponential gaps and advances the bridge exactly from
    one arrival to the next, stopping at the first violation.
    """
    n = _check_n(n)
    started = time.perf_counter()
    ind = survival_samples(exp, n, master_seed, window, workers)
    return _estimate(ind, master_seed, started, workers)


def estimate_survival_reference(exp: BarrierExperiment, n, master_seed=DEFAULT_SEED):
    """Slow path-by-path version of :func:`estimate_survival`.

    Chains :func:`sample_ppp`, :func:`sample_bridge`, :func:`sample_decorations`
    and :func:`indicator_Q` on a sequential stream; meant for cross-checks
    with a few thousand replicas.
    """
    t = exp._t()
    _require_envelope(exp.curve, t)
    rng = RngStream(master_seed, Stream.REFERENCE)
    started = time.perf_counter()
    out = np.empty(int(n), dtype=np.uint8)
    for i in range(int(n)):
        arr = sample_ppp(exp.ppp, t, rng)
        path = sample_bridge(exp.x, exp.y, t, arr.times, rng)
        dec = sample_decorations(exp.decorations, list(arr.times), rng)
        out[i] = indicator_Q(path, exp.curve, dec)
    return _estimate(out, master_seed, started, 1)


def fg_samples(side: FgSide, exp: BarrierExperiment, n, master_seed=DEFAULT_SEED, workers=1):
    """Per-replica values of ``W_s^- 1{Q_inf(0, s)}`` for one side."""
    curve = exp.curve
    if not curve.has_limits:
        raise ConfigurationError("curve has no declared limits", field="curve.limits")
    end = side.side == "end"
    start_enc, end_enc = encode_limit(curve, side.s_horizon)
    cp, ctab = end_enc if end else start_enc
    deco = exp.decorations
    deco_limit = end
    if deco.reflect_horizon is not None:
        # reflected decorations: Y_inf governs the start side, Y_u the end side
        deco = replace(deco, reflect_horizon=None)
        deco_limit = not end
    dp, dtab = encode_decorations(deco)
    stream = Stream.END_SIDE if end else Stream.START_SIDE
    k0, k1 = split_seed(master_seed)
    with _threads(workers):
        return kernels.free_negative_part(int(n), k0, k1, np.uint64(stream), float(side.x_start),
                                          float(side.s_horizon), float(exp.ppp.rate_lambda),
                                          cp, ctab, dp, dtab, end, deco_limit, 0)


def estimate_fg(side: FgSide, exp: BarrierExperiment, n, workers=1,
                master_seed=DEFAULT_SEED) -> Estimate:
    """``f_s(x)`` (start side) or ``g_s(x)`` (end side) by free-motion replicas.

    The start side uses the limit curve ``gamma_{inf,u}`` and decorations
    ``Y_u``; the end side uses ``gamma_{inf,-u}`` and i.i.d. copies of ``Y_inf``.
    """
    n = _check_n(n)
    started = time.perf_counter()
    vals = fg_samples(side, exp, n, master_seed, workers)
    return _estimate(vals, master_seed, started, workers)


@dataclass
class AsymptoticRow:
    t: float
    survival: Estimate
    scaled: float
    scaled_se: float
    target: float
    target_se: float
    ratio: float
    ratio_se: float


@dataclass
class AsymptoticReport:
    x: float
    y: float
    s: float
    f: Estimate
    g: Estimate
    rows: list
    tol: float
    verdict: Verdict
    sensitivity: dict = field(default_factory=dict)


def check_asymptotic(exp: BarrierExperiment, x, y, t_grid, s=100.0, n=10**6, n_fg=None,
                     tol=0.2, epsilon=0.1, sensitivity=(25.0, 50.0, 100.0), workers=1,
                     master_seed=DEFAULT_SEED) -> AsymptoticReport:
    """Compare ``t P(Q_t)`` with ``2 f_s(x) g_s(y)`` along ``t_grid``.

    The verdict looks at the largest ``t``: INCONCLUSIVE when the 3-sigma
    half-width of the ratio exceeds ``tol``, PASS when the ratio lies in
    ``[1 - tol, 1 + tol]``, FAIL otherwise.
    """
    t_grid = [float(t) for t in t_grid]
    if not t_grid or any(b <= a for a, b in zip(t_grid, t_grid[1:])):
        raise ConfigurationError("t_grid must be a non-empty increasing list", field="t_grid")
    region = RangeRegion(epsilon)
    for t in t_grid:
        region.require(x, y, t)
    n_fg = n if n_fg is None else n_fg
    f = estimate_fg(FgSide("start", s, x), exp, n_fg, workers, master_seed)
    g = estimate_fg(FgSide("end", s, y), exp, n_fg, workers, master_seed)
    target, target_se = product_se([2 * f.value, g.value], [2 * f.std_error, g.std_error])
    rows = []
    for t in t_grid:
        est = estimate_survival(exp.at(x, y, t), n, workers, master_seed)
        scaled, scaled_se = t * est.value, t * est.std_error
        ratio, ratio_se = math.nan, math.nan
        if target > 0 and scaled > 0:
            ratio = scaled / target
            ratio_se = ratio * math.hypot(scaled_se / scaled, target_se / target)
        rows.append(AsymptoticRow(t, est, scaled, scaled_se, target, target_se, ratio, ratio_se))
    last = rows[-1]
    if not math.isfinite(last.ratio_se) or 3 * last.ratio_se > tol:
        verdict = Verdict.INCONCLUSIVE
    elif abs(last.ratio - 1) <= tol:
        verdict = Verdict.PASS
    else:
        verdict = Verdict.FAIL
    sens = {}
    for s2 in sensitivity:
        if float(s2) == float(s):
            f2, g2 = f, g
        else:
            f2 = estimate_fg(FgSide("start", s2, x), exp, n_fg, workers, master_seed)
            g2 = estimate_fg(FgSide("end", s2, y), exp, n_fg, workers, master_seed)
        sens[float(s2)] = (f2, g2)
    return AsymptoticReport(float(x), float(y), float(s), f, g, rows, tol, verdict, sens)


@dataclass
class BoundCell:
    x: float
    y: float
    t: float
    survival: Estimate
    ratio: float
    ratio_se: float
    normalized: Optional[float] = None
    normalized_se: Optional[float] = None


@dataclass
class BoundScan:
    cells: list
    c_hat: float

    def trend(self, x, y, normalized=False):
        """Least-squares slope in ``log t`` of the ratio (or of the normalized
        ratio, for ``x y <= 0``) at fixed ``(x, y)``."""
        sel = [c for c in self.cells if c.x == x and c.y == y]
        if len(sel) < 2:
            raise DomainError("a trend needs at least two horizons")
        if normalized:
            if sel[0].normalized is None:
                raise DomainError("the normalized ratio is only defined when x y <= 0")
            return ls_slope([math.log(c.t) for c in sel], [c.normalized for c in sel],
                            [c.normalized_se for c in sel])
        return ls_slope([math.log(c.t) for c in sel], [c.ratio for c in sel],
                        [c.ratio_se for c in sel])


def bound_normalization(x, y, t, lam, delta):
    """``(x^- + e^{-a x^+})(y^- + e^{-a y^+}) e^{(y-x)^2/2t} / t`` with
    ``a = sqrt(2 lam)(1 - delta)``."""
    a = math.sqrt(2 * lam) * (1 - delta)
    fx = max(-x, 0.0) + math.exp(-a * max(x, 0.0))
    fy = max(-y, 0.0) + math.exp(-a * max(y, 0.0))
    return fx * fy * math.exp((y - x) ** 2 / (2 * t)) / t


def scan_bound_constant(template: BarrierExperiment, region: RangeRegion, x_list, y_list,
                        t_list, n, workers=1, master_seed=DEFAULT_SEED) -> BoundScan:
    """``t p / ((x^- + 1)(y^- + 1))`` over a lattice and ``C = max(ratio + 3 se)``.

    Cells with ``x y <= 0`` also carry ``p`` divided by
    :func:`bound_normalization`.
    """
    cells = []
    for t in t_list:
        for x in x_list:
            for y in y_list:
                region.require(x, y, t)
    for t in t_list:
        for x in x_list:
            for y in y_list:
                est = estimate_survival(template.at(x, y, t), n, workers, master_seed)
                norm = (max(-x, 0.0) + 1) * (max(-y, 0.0) + 1)
                cell = BoundCell(float(x), float(y), float(t), est, t * est.value / norm,
                                 t * est.std_error / norm)
                if x * y <= 0:
                    b = bound_normalization(x, y, t, template.ppp.rate_lambda,
                                            template.curve.delta)
                    cell.normalized = est.value / b
                    cell.normalized_se = est.std_error / b
                cells.append(cell)
    c_hat = max(c.ratio + 3 * c.ratio_se for c in cells)
    return BoundScan(cells, float(c_hat))


@dataclass(frozen=True)
class RepulsionEstimate(Estimate):
    """Conditional probability with the joint and conditioning probabilities."""

    joint: float = math.nan
    survival: float = math.nan
    survival_se: float = math.nan
    status: Verdict = Verdict.NA


def estimate_repulsion(exp: BarrierExperiment, rc: RepulsionConfig, n, workers=1,
                       master_seed=DEFAULT_SEED) -> RepulsionEstimate:
    """``P(max over [s, t-s] of W - gamma >= -M | Q_t)`` as a ratio of means.

    Between consecutive observation points (arrivals and grid nodes) the
    bridge is flagged as touching ``gamma - M`` with the exact crossing
    probability against the linearized barrier. The status is INCONCLUSIVE
    when the 3-sigma interval of ``P(Q_t)`` reaches 0.
    """
    n = _check_n(n)
    t = exp._t()
    s = float(rc.s_inner)
    if not 2 < s <= t / 2:
        raise DomainError(f"s must lie in (2, t/2] = (2, {t / 2:g}], got {s:g}")
    _require_envelope(exp.curve, t)
    ok, bad = validate_regularity(exp.curve, t)
    if not ok:
        raise ConfigurationError(f"curve fails regularity inequality {bad[1]} at {bad[0]}",
                                 field="curve")
    cp, ctab = encode_curve(exp.curve, t)
    dp, dtab = encode_decorations(exp.decorations)
    k0, k1 = split_seed(master_seed)
    started = time.perf_counter()
    with _threads(workers):
        q, both = kernels.repulsion(n, k0, k1, np.uint64(Stream.REPULSION), float(exp.x),
                                    float(exp.y), t, float(exp.ppp.rate_lambda), cp, ctab, dp,
                                    dtab, s, t - s, float(rc.M), float(rc.grid_step),
                                    int(rc.refine), 0)
    ratio, se, den, den_se = ratio_of_means(both, q)
    status = Verdict.INCONCLUSIVE if den - 3 * den_se <= 0 else Verdict.NA
    return RepulsionEstimate(ratio, se, n, int(master_seed), time.perf_counter() - started,
                             int(workers), float(both.mean()), den, den_se, status)


@dataclass
class ContinuityRow:
    x: float
    r: int
    f: Estimate
    gap: float
    gap_se: float
    g: Estimate
    g_identical: bool


@dataclass
class ContinuityReport:
    limit_f: dict
    limit_g: dict
    rows: list
    tol: float
    g_identical: bool
    verdict: Verdict


def _common_delta(members):
    curve_d = {c.delta for _, c in members}
    deco_d = {d.tail_delta for d, _ in members}
    if len(curve_d) > 1 or len(deco_d) > 1:
        raise ConfigurationError(
            f"family members disagree on delta (curves {sorted(curve_d)}, "
            f"decorations {sorted(deco_d)})", field="family.delta")


def continuity_experiment(family_seq: Sequence, limit, x_list, s, n, lam=1.0, tol=0.02,
                          workers=1, master_seed=DEFAULT_SEED) -> ContinuityReport:
    """Convergence of ``f_s`` and ``g_s`` along a family of (decorations, curve).

    All members share the seed, so the replicas are coupled through common
    random numbers and the gaps ``f^(r) - f`` are estimated from paired
    differences. PASS requires the absolute gaps to be non-increasing in
    ``r`` and the last one below ``tol + 3 se`` for every ``x``.
    """
    members = [tuple(m) for m in family_seq]
    if not members:
        raise ConfigurationError("empty family", field="family")
    _common_delta(members + [tuple(limit)])
    n = _check_n(n)
    ppp = PppConfig(lam)
    lim_exp = BarrierExperiment(ppp, limit[1], limit[0])
    limit_f, limit_g, rows = {}, {}, []
    passed = True
    all_identical = True
    for x in x_list:
        t0 = time.perf_counter()
        base_f = fg_samples(FgSide("start", s, x), lim_exp, n, master_seed, workers)
        limit_f[x] = _estimate(base_f, master_seed, t0, workers)
        t0 = time.perf_counter()
        base_g = fg_samples(FgSide("end", s, x), lim_exp, n, master_seed, workers)
        limit_g[x] = _estimate(base_g, master_seed, t0, workers)
        gaps = []
        for r, (deco, curve) in enumerate(members):
            e = BarrierExperiment(ppp, curve, deco)
            t0 = time.perf_counter()
            fr = fg_samples(FgSide("start", s, x), e, n, master_seed, workers)
            f_est = _estimate(fr, master_seed, t0, workers)
            t0 = time.perf_counter()
            gr = fg_samples(FgSide("end", s, x), e, n, master_seed, workers)
            g_est = _estimate(gr, master_seed, t0, workers)
            same = bool(np.array_equal(gr, base_g))
            all_identical &= same
            gap, gap_se = mean_and_se(fr - base_f)
            gaps.append((abs(gap), gap_se))
            rows.append(ContinuityRow(float(x), r, f_est, gap, gap_se, g_est, same))
        if any(b[0] > a[0] for a, b in zip(gaps, gaps[1:])):
            passed = False
        if not gaps[-1][0] < tol + 3 * gaps[-1][1]:
            passed = False
    verdict = Verdict.PASS if passed else Verdict.FAIL
    return ContinuityReport(limit_f, limit_g, rows, tol, all_identical, verdict)


@dataclass
class MonotonicityReport:
    low: Estimate
    high: Estimate
    violations: int
    identical: bool

    @property
    def verdict(self):
        return Verdict.PASS if self.violations == 0 else Verdict.FAIL


def monotonicity_coupled(exp: BarrierExperiment, low, high, n, workers=1,
                         master_seed=DEFAULT_SEED) -> MonotonicityReport:
    """Survival from ``low`` and from ``high`` on one coupled sample.

    The bridge from ``high`` is the bridge from ``low`` plus the straight line
    from ``high[0] - low[0]`` to ``high[1] - low[1]``; both indicators use the
    same arrivals and decorations.
    """
    (x, y), (x2, y2) = low, high
    if not (x <= x2 and y <= y2):
        raise DomainError(f"endpoints must be ordered componentwise: {low} vs {high}")
    n = _check_n(n, 1)
    t = exp._t()
    _require_envelope(exp.curve, t)
    cp, ctab = encode_curve(exp.curve, t)
    dp, dtab = encode_decorations(exp.decorations)
    k0, k1 = split_seed(master_seed)
    started = time.perf_counter()
    with _threads(workers):
        lo, hi = kernels.paired_survival(n, k0, k1, np.uint64(Stream.PAIRED), float(x),
                                         float(y), float(x2 - x), float(y2 - y), t,
                                         float(exp.ppp.rate_lambda), cp, ctab, dp, dtab, 0)
    violations = int(np.sum((hi == 1) & (lo == 0)))
    return MonotonicityReport(_estimate(lo, master_seed, started, workers),
                              _estimate(hi, master_seed, started, workers), violations,
                              bool(np.array_equal(lo, hi)))


def estimate_bridge_crossing(w0, w1, b0, b1, h, n, n_steps, corrected=True, workers=1,
                             master_seed=DEFAULT_SEED) -> Estimate:
    """P(bridge w0 -> w1 on [0, h] reaches the line b0 -> b1), fine-grid simulation.

    With ``corrected`` each step also counts as a hit with its exact bridge
    crossing probability, which removes the grid bias.
    """
    n = _check_n(n, 1)
    if not h > 0 or int(n_steps) < 1:
        raise DomainError("need h > 0 and at least one step")
    k0, k1 = split_seed(master_seed)
    started = time.perf_counter()
    with _threads(workers):
        hits = kernels.linear_crossing(n, k0, k1, np.uint64(Stream.CROSSING), float(w0),
                                       float(w1), float(b0), float(b1), float(h), int(n_steps),
                                       bool(corrected), 0)
    return _estimate(hits, master_seed, started, workers)
