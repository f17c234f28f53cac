"""Replica kernels.

Each kernel simulates ``n`` independent replicas in a ``prange`` loop. Replica
``first + i`` draws exclusively from lane ``first + i + 1`` of the Philox
stream (see :mod:`barrier_mc.rng`), so outputs do not depend on the number of
threads or on how ``n`` is chunked.

Arrivals are generated on the fly from exponential gaps and the Gaussian path
is advanced with the exact conditional transition (bridge or free motion), so
a replica stops at the first arrival that violates the barrier.

Per-replica counter layout ``(block, lane, stream, tag(purpose, sub))``:

* purpose 0, block k, sub 0: arrival k -> (gap, gaussian)
* purpose 0, block k, sub 1: arrival k -> (decoration, segment crossing)
* purpose 1, block 0: terminal gaussian of the free-motion kernel
* purpose 2, block j: grid point j -> (gaussian, segment crossing)
* purpose 3, block 2k or 2j+1, sub m: m-th refinement point inside the segment
  ending at arrival k or at grid point j
* purpose 4, block q: gaussians of fine-grid steps 2q+1 and 2q+2
* purpose 5, block j: crossing uniform of fine-grid step j

Curves and decoration laws enter as small float arrays built by
:func:`barrier_mc.curves.encode_curve` and
:func:`barrier_mc.samplers.encode_decorations`.
"""
from __future__ import annotations

import math

import numba as nb
import numpy as np

from .rng import ndtri, tag, uniform_pair

# the bundled TBB is often too old for numba; prefer OpenMP, then the built-in pool
nb.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

# curve codes
CANONICAL, CONSTANT, PROFILE, TABLE = 0, 1, 2, 3
# decoration codes
ZERO, LAPLACE, LIMIT_SHIFTED, QUANTILE_TABLE = 0, 1, 2, 3

CURVE_PARAMS = 12
DECO_PARAMS = 8

# exp(x) is below the smallest uniform ever produced (2**-53) when x < -38
_NEVER = -38.0


@nb.njit(cache=True, inline="always")
def _power(a, b, p, v):
    if v <= 0.0:
        return a + (b if p == 0.0 else 0.0)
    return a + b * v ** p


@nb.njit(cache=True)
def _table(tab, span, v):
    m = tab.shape[0]
    if m == 1 or span <= 0.0:
        return tab[0]
    x = v / span * (m - 1)
    if x <= 0.0:
        return tab[0]
    if x >= m - 1:
        return tab[m - 1]
    j = int(x)
    f = x - j
    return tab[j] + f * (tab[j + 1] - tab[j])


@nb.njit(cache=True)
def curve_at(cp, ctab, t, u):
    """gamma_{t,u} for an encoded curve."""
    if cp[3] != 0.0:
        u = t - u
    kind = int(cp[0])
    if kind == CANONICAL:
        w = min(u, t - u)
        return (cp[2] + (w ** (0.5 - cp[1]) if w > 0.0 else 0.0)) / cp[1]
    if kind == CONSTANT:
        return cp[2]
    if kind == PROFILE:
        gp = _power(cp[4], cp[5], cp[6], u)
        gm = _power(cp[7], cp[8], cp[9], t - u)
        if cp[10] != 0.0:
            return min(gp, gm)
        return gp if u <= 0.5 * t else gm
    return _table(ctab, cp[11], u)


@nb.njit(cache=True)
def limit_at(cp, ctab, u, minus):
    """gamma_{inf,u} (minus=False) or gamma_{inf,-u} (minus=True)."""
    if cp[3] != 0.0:
        minus = not minus
    kind = int(cp[0])
    if kind == CANONICAL:
        return (cp[2] + (u ** (0.5 - cp[1]) if u > 0.0 else 0.0)) / cp[1]
    if kind == CONSTANT:
        return cp[2]
    if kind == PROFILE:
        if minus:
            return _power(cp[7], cp[8], cp[9], u)
        return _power(cp[4], cp[5], cp[6], u)
    return _table(ctab, cp[11], u)


@nb.njit(cache=True)
def deco_draw(dp, dtab, label, at_limit, unif):
    """One decoration from a uniform; ``at_limit`` selects the law of Y_inf."""
    base = int(dp[1])
    if base == LAPLACE:
        if unif < 0.5:
            v = math.log(2.0 * unif) / dp[2]
        else:
            v = -math.log(2.0 * (1.0 - unif)) / dp[2]
    elif base == QUANTILE_TABLE:
        v = _table(dtab, 1.0, unif)
    else:
        v = 0.0
    if int(dp[0]) == LIMIT_SHIFTED and not at_limit:
        lab = dp[6] - label if dp[5] != 0.0 else label
        v += dp[3] * math.exp(-dp[4] * lab)
    return v


@nb.njit(cache=True, inline="always")
def crossing_prob(w0, w1, b0, b1, h):
    if w0 >= b0 or w1 >= b1:
        return 1.0
    e = -2.0 * (b0 - w0) * (b1 - w1) / h
    if e < -745.0:
        return 0.0
    return math.exp(e)


@nb.njit(cache=True)
def _bridge_survives(k0, k1, stream, lane, x, y, t, lam, cp, ctab, dp, dtab, u1, u2):
    t00 = tag(0, 0)
    t01 = tag(0, 1)
    random_deco = int(dp[0]) != ZERO
    s_prev = 0.0
    w = x
    k = np.uint64(0)
    while True:
        ug, un = uniform_pair(k0, k1, k, lane, stream, t00)
        s = s_prev - math.log(ug) / lam
        if s >= t:
            return True
        rem = t - s_prev
        dt = s - s_prev
        w = w + (y - w) * dt / rem + math.sqrt(dt * (t - s) / rem) * ndtri(un)
        if s >= u1 and s <= u2:
            level = curve_at(cp, ctab, t, s)
            if random_deco:
                ud, uc = uniform_pair(k0, k1, k, lane, stream, t01)
                level += deco_draw(dp, dtab, s, False, ud)
            if w > level:
                return False
        s_prev = s
        k += np.uint64(1)


@nb.njit(cache=True, parallel=True)
def survival(n, k0, k1, stream, x, y, t, lam, cp, ctab, dp, dtab, u1, u2, first):
    """Indicators of Q_t(u1, u2) for bridges from x to y on [0, t]."""
    out = np.empty(n, dtype=np.uint8)
    for i in nb.prange(n):
        lane = np.uint64(first + i + 1)
        out[i] = _bridge_survives(k0, k1, stream, lane, x, y, t, lam, cp, ctab, dp, dtab, u1, u2)
    return out


@nb.njit(cache=True)
def _free_value(k0, k1, stream, lane, x, s, lam, cp, ctab, dp, dtab, end_side, deco_limit):
    t00 = tag(0, 0)
    t01 = tag(0, 1)
    random_deco = int(dp[0]) != ZERO
    s_prev = 0.0
    w = x
    k = np.uint64(0)
    while True:
        ug, un = uniform_pair(k0, k1, k, lane, stream, t00)
        sk = s_prev - math.log(ug) / lam
        if sk >= s:
            break
        w = w + math.sqrt(sk - s_prev) * ndtri(un)
        level = limit_at(cp, ctab, sk, end_side)
        if random_deco:
            ud, uc = uniform_pair(k0, k1, k, lane, stream, t01)
            level += deco_draw(dp, dtab, sk, deco_limit, ud)
        if w > level:
            return 0.0
        s_prev = sk
        k += np.uint64(1)
    ua, ub = uniform_pair(k0, k1, np.uint64(0), lane, stream, tag(1, 0))
    w = w + math.sqrt(s - s_prev) * ndtri(ua)
    return -w if w < 0.0 else 0.0


@nb.njit(cache=True, parallel=True)
def free_negative_part(n, k0, k1, stream, x, s, lam, cp, ctab, dp, dtab, end_side, deco_limit,
                       first):
    """Replicas of W_s^- 1{Q_inf(0, s)} (start side) or of its end-side analogue.

    ``end_side`` selects gamma_{inf,-u}; ``deco_limit`` draws every decoration
    from the law of Y_inf.
    """
    out = np.empty(n, dtype=np.float64)
    for i in nb.prange(n):
        lane = np.uint64(first + i + 1)
        out[i] = _free_value(k0, k1, stream, lane, x, s, lam, cp, ctab, dp, dtab, end_side,
                             deco_limit)
    return out


@nb.njit(cache=True)
def _paired(k0, k1, stream, lane, x, y, dx, dy, t, lam, cp, ctab, dp, dtab):
    t00 = tag(0, 0)
    t01 = tag(0, 1)
    random_deco = int(dp[0]) != ZERO
    s_prev = 0.0
    w = x
    k = np.uint64(0)
    low = True
    high = True
    while low or high:
        ug, un = uniform_pair(k0, k1, k, lane, stream, t00)
        s = s_prev - math.log(ug) / lam
        if s >= t:
            break
        rem = t - s_prev
        dt = s - s_prev
        w = w + (y - w) * dt / rem + math.sqrt(dt * (t - s) / rem) * ndtri(un)
        level = curve_at(cp, ctab, t, s)
        if random_deco:
            ud, uc = uniform_pair(k0, k1, k, lane, stream, t01)
            level += deco_draw(dp, dtab, s, False, ud)
        lift = dx * (1.0 - s / t) + dy * (s / t)
        if w > level:
            low = False
        if w + lift > level:
            high = False
        s_prev = s
        k += np.uint64(1)
    return low, high


@nb.njit(cache=True, parallel=True)
def paired_survival(n, k0, k1, stream, x, y, dx, dy, t, lam, cp, ctab, dp, dtab, first):
    """Survival of a bridge from (x, y) and of the same path lifted to (x+dx, y+dy)."""
    low = np.empty(n, dtype=np.uint8)
    high = np.empty(n, dtype=np.uint8)
    for i in nb.prange(n):
        lane = np.uint64(first + i + 1)
        a, b = _paired(k0, k1, stream, lane, x, y, dx, dy, t, lam, cp, ctab, dp, dtab)
        low[i] = a
        high[i] = b
    return low, high


@nb.njit(cache=True)
def _segment_prob(k0, k1, stream, lane, seg_id, s0, w0, s1, w1, lo, step, refine,
                  t, cp, ctab, margin):
    """Probability that the path crosses gamma - margin on (s0, s1).

    With ``refine > 1`` the points of the grid of step ``step / refine`` lying
    strictly inside the segment are sampled first and the barrier is
    linearized on each sub-segment.
    """
    b0 = curve_at(cp, ctab, t, s0) - margin
    b1 = curve_at(cp, ctab, t, s1) - margin
    if refine <= 1:
        return crossing_prob(w0, w1, b0, b1, s1 - s0)
    fine = step / refine
    m = int(math.floor((s0 - lo) / fine + 1e-9)) + 1
    keep = 1.0
    pa, pw, pb = s0, w0, b0
    sub = 0
    while True:
        q = lo + m * fine
        if q >= s1 - 1e-9:
            break
        ua, ub = uniform_pair(k0, k1, seg_id, lane, stream, tag(3, sub))
        rem = s1 - pa
        dq = q - pa
        qw = pw + (w1 - pw) * dq / rem + math.sqrt(dq * (s1 - q) / rem) * ndtri(ua)
        qb = curve_at(cp, ctab, t, q) - margin
        keep *= 1.0 - crossing_prob(pw, qw, pb, qb, dq)
        pa, pw, pb = q, qw, qb
        m += 1
        sub += 1
    keep *= 1.0 - crossing_prob(pw, w1, pb, b1, s1 - pa)
    return 1.0 - keep


@nb.njit(cache=True)
def _repulsion_replica(k0, k1, stream, lane, x, y, t, lam, cp, ctab, dp, dtab,
                       lo, hi, margin, step, refine):
    t00 = tag(0, 0)
    t01 = tag(0, 1)
    t20 = tag(2, 0)
    random_deco = int(dp[0]) != ZERO
    n_grid = int(math.floor((hi - lo) / step + 1e-9)) + 1
    if lo + (n_grid - 1) * step < hi - 1e-9:
        n_grid += 1

    k = np.uint64(0)
    ug, un = uniform_pair(k0, k1, k, lane, stream, t00)
    next_arr = -math.log(ug) / lam
    j = 0
    s_prev = 0.0
    w = x
    hit = False
    prev_in = False
    while True:
        if j < n_grid:
            g_time = hi if j == n_grid - 1 else lo + j * step
        else:
            g_time = math.inf
        on_grid = g_time <= next_arr
        s = g_time if on_grid else next_arr
        if s >= t:
            return True, hit
        if on_grid:
            z_u, cross_u = uniform_pair(k0, k1, np.uint64(j), lane, stream, t20)
            seg_id = np.uint64(2 * j + 1)
        else:
            z_u = un
            ud, cross_u = uniform_pair(k0, k1, k, lane, stream, t01)
            seg_id = np.uint64(2) * k
        rem = t - s_prev
        dt = s - s_prev
        w_new = w + (y - w) * dt / rem + math.sqrt(dt * (t - s) / rem) * ndtri(z_u)
        g = curve_at(cp, ctab, t, s)
        if not on_grid:
            level = g
            if random_deco:
                level += deco_draw(dp, dtab, s, False, ud)
            if w_new > level:
                return False, False
        in_win = s >= lo - 1e-9 and s <= hi + 1e-9
        if in_win and not hit:
            if w_new - g >= -margin:
                hit = True
            elif prev_in and dt > 0.0:
                p = _segment_prob(k0, k1, stream, lane, seg_id, s_prev, w, s, w_new,
                                  lo, step, refine, t, cp, ctab, margin)
                if cross_u < p:
                    hit = True
        prev_in = in_win
        s_prev = s
        w = w_new
        if on_grid:
            j += 1
        else:
            k += np.uint64(1)
            ug, un = uniform_pair(k0, k1, k, lane, stream, t00)
            next_arr = s - math.log(ug) / lam


@nb.njit(cache=True, parallel=True)
def repulsion(n, k0, k1, stream, x, y, t, lam, cp, ctab, dp, dtab, lo, hi, margin,
              step, refine, first):
    """Per replica: Q_t(0, t), and Q_t(0, t) together with
    {max over [lo, hi] of W - gamma >= -margin} (continuous max, crossing corrected)."""
    q = np.empty(n, dtype=np.uint8)
    both = np.empty(n, dtype=np.uint8)
    for i in nb.prange(n):
        lane = np.uint64(first + i + 1)
        a, b = _repulsion_replica(k0, k1, stream, lane, x, y, t, lam, cp, ctab, dp, dtab,
                                  lo, hi, margin, step, refine)
        q[i] = a
        both[i] = a and b
    return q, both


@nb.njit(cache=True)
def _linear_replica(k0, k1, stream, lane, w0, w1, b0, b1, h, n_steps, corrected):
    t40 = tag(4, 0)
    t50 = tag(5, 0)
    dt = h / n_steps
    w = w0
    za = 0.0
    zb = 0.0
    for j in range(1, n_steps + 1):
        if j % 2 == 1:
            za, zb = uniform_pair(k0, k1, np.uint64(j // 2), lane, stream, t40)
            zu = za
        else:
            zu = zb
        s_prev = (j - 1) * dt
        s = j * dt
        if j == n_steps:
            w_new = w1
        else:
            rem = h - s_prev
            w_new = w + (w1 - w) * dt / rem + math.sqrt(dt * (h - s) / rem) * ndtri(zu)
        bp = b0 + (b1 - b0) * (s_prev / h)
        bn = b0 + (b1 - b0) * (s / h)
        if w_new >= bn:
            return True
        if corrected:
            e = -2.0 * (bp - w) * (bn - w_new) / dt
            if e > _NEVER:
                uc, ud = uniform_pair(k0, k1, np.uint64(j), lane, stream, t50)
                if uc < math.exp(e):
                    return True
        w = w_new
    return False


@nb.njit(cache=True, parallel=True)
def linear_crossing(n, k0, k1, stream, w0, w1, b0, b1, h, n_steps, corrected, first):
    """Indicators that a bridge w0 -> w1 on [0, h] reaches the line b0 -> b1.

    The path is sampled on ``n_steps`` equal steps; with ``corrected`` each
    step is also flagged with its exact bridge crossing probability.
    """
    out = np.empty(n, dtype=np.uint8)
    for i in nb.prange(n):
        lane = np.uint64(first + i + 1)
        out[i] = _linear_replica(k0, k1, stream, lane, w0, w1, b0, b1, h, n_steps, corrected)
    return out


@nb.njit(cache=True, parallel=True)
def arrival_counts(n, k0, k1, stream, t, lam, first):
    """Number of arrivals in [0, t] per replica, from the kernels' gap stream."""
    t00 = tag(0, 0)
    out = np.empty(n, dtype=np.int64)
    for i in nb.prange(n):
        lane = np.uint64(first + i + 1)
        s = 0.0
        k = np.uint64(0)
        while True:
            ug, un = uniform_pair(k0, k1, k, lane, stream, t00)
            s -= math.log(ug) / lam
            if s >= t:
                break
            k += np.uint64(1)
        out[i] = np.int64(k)
    return out
