"""Acceptance criteria 1-10 at their stated sizes and tolerances.

Every test records one line ``criterion N: PASS|FAIL ...`` which is printed
in the terminal summary, then asserts the same verdict. Wall-clock budgets
count as part of the criterion.
"""
import math
import os
import time

import pytest

from barrier_mc import cli
from barrier_mc import estimators as est
from barrier_mc.curves import CurveSpec
from barrier_mc.rng import RngStream
from barrier_mc.samplers import DecorationFamily, PppConfig, sample_bridge_paths
from barrier_mc.stats import ls_slope

pytestmark = pytest.mark.slow

SEED = est.DEFAULT_SEED
RESULTS = {}
CANONICAL = CurveSpec.canonical_plus(0.25)
LAPLACE = DecorationFamily.two_sided_exponential(1.0)
FLAT = CurveSpec.constant(0.0)
ZERO = DecorationFamily.zero()


def record(n, ok, detail, started, budget):
    elapsed = time.perf_counter() - started
    ok = bool(ok) and elapsed < budget
    RESULTS[n] = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}  [{elapsed:.0f} s / {budget:.0f} s]"
    print(RESULTS[n])
    assert ok, RESULTS[n]


def canonical(x=-1.0, y=-1.0, t=None):
    return est.BarrierExperiment(PppConfig(1.0), CANONICAL, LAPLACE, x, y, t)


def flat(x=-1.0, y=-1.0, t=None):
    # gamma = 0, Y = 0: close enough to the limit regime at desk-scale horizons
    return est.BarrierExperiment(PppConfig(1.0), FLAT, ZERO, x, y, t)


def test_criterion_01_bridge_marginal():
    started = time.perf_counter()
    w = sample_bridge_paths(0.0, 0.0, 4.0, [2.0], RngStream(SEED, 1), 10**6)[:, 0]
    m, v = float(w.mean()), float(w.var(ddof=1))
    record(1, abs(m) <= 0.003 and 0.99 <= v <= 1.01, f"mean={m:+.5f} var={v:.5f}", started, 10)


def test_criterion_02_reflection():
    started = time.perf_counter()
    e = est.estimate_bridge_crossing(0.0, 0.0, 1.0, 1.0, 2.0, 10**6, 2000, master_seed=SEED)
    z = (e.value - math.exp(-1)) / e.std_error
    record(2, abs(z) <= 3, f"{e.value:.6f} +- {e.std_error:.6f} vs exp(-1), z={z:+.2f}",
           started, 120)


def test_criterion_03_ballot():
    started = time.perf_counter()
    ests = {}
    for lam in (5.0, 20.0, 50.0):
        exp = est.BarrierExperiment(PppConfig(lam), FLAT, ZERO, -1.0, -1.0, 2.0)
        ests[lam] = est.estimate_survival(exp, 10**6, master_seed=SEED)
    e50 = ests[50.0]
    in_band = 0.632 <= e50.value <= 0.70
    pairs = [(5.0, 20.0), (20.0, 50.0)]
    monotone = all(ests[a].value >= ests[b].value - 3 * math.hypot(ests[a].std_error,
                                                                    ests[b].std_error)
                   for a, b in pairs)
    above = all(e.value >= 1 - math.exp(-1) - 3 * e.std_error for e in ests.values())
    detail = ", ".join(f"lam={lam:g}: {e.value:.5f}+-{e.std_error:.5f}" for lam, e in ests.items())
    detail += f"; band [0.632, 0.70] {'ok' if in_band else 'missed'}"
    detail += f", monotone {'ok' if monotone else 'broken'}"
    record(3, in_band and monotone and above, detail, started, 300)


def test_criterion_04_bound_scaling():
    started = time.perf_counter()
    scan = est.scan_bound_constant(canonical(), est.RangeRegion(0.1), [-1.0], [-1.0],
                                   [16.0, 64.0, 256.0, 1024.0], 10**6, master_seed=SEED)
    slope, se = scan.trend(-1.0, -1.0)
    ratios = " ".join(f"{c.ratio:.2f}" for c in scan.cells)
    record(4, slope <= 3 * se, f"ratios {ratios}; slope {slope:.3f} +- {se:.3f}", started, 900)


def test_criterion_05_asymptotics():
    started = time.perf_counter()
    parts, ok = [], True
    for x, y in ((-1.0, -1.0), (0.0, 0.0)):
        rep = est.check_asymptotic(flat(), x, y, [1024.0], s=100.0, n=10**6, n_fg=10**6,
                                   tol=0.2, sensitivity=(), master_seed=SEED)
        r = rep.rows[-1]
        lo, hi = r.ratio - 3 * r.ratio_se, r.ratio + 3 * r.ratio_se
        good = 0.8 <= r.ratio <= 1.2 and lo <= 1.2 and hi >= 0.8
        ok &= good
        parts.append(f"({x:g},{y:g}) ratio {r.ratio:.3f} +- {r.ratio_se:.3f}")
    record(5, ok, "; ".join(parts), started, 1200)


def test_criterion_06_slope_limit():
    started = time.perf_counter()
    e = est.estimate_fg(est.FgSide("start", 20.0, -50.0), canonical(), 10**5, master_seed=SEED)
    ratio = e.value / 50.0
    record(6, 0.9 <= ratio <= 1.1, f"f_20(-50)/50 = {ratio:.4f} +- {e.std_error / 50:.4f}",
           started, 300)


def test_criterion_07_repulsion():
    started = time.perf_counter()
    exp = flat(t=256.0)
    pts, moved = [], []
    for s in (4.0, 16.0, 64.0):
        a = est.estimate_repulsion(exp, est.RepulsionConfig(1.0, s), 10**6, master_seed=SEED)
        b = est.estimate_repulsion(exp, est.RepulsionConfig(1.0, s, refine=2), 10**6,
                                   master_seed=SEED)
        pts.append((math.log(s), math.sqrt(s) * a.value, math.sqrt(s) * a.std_error))
        moved.append(abs(b.value - a.value) < 3 * a.std_error)
    slope, se = ls_slope(*zip(*pts))
    vals = " ".join(f"{v:.4f}" for _, v, _ in pts)
    record(7, slope <= 3 * se and all(moved),
           f"sqrt(s) p = {vals}; slope {slope:+.4f} +- {se:.4f}; halved step within CI: {all(moved)}",
           started, 1200)


def test_criterion_08_monotonicity():
    started = time.perf_counter()
    rep = est.monotonicity_coupled(canonical(t=64.0), (-2.0, -2.0), (0.0, 0.0), 10**5,
                                   master_seed=SEED)
    record(8, rep.violations == 0,
           f"{rep.violations} violations; P_low={rep.low.value:.4f} P_high={rep.high.value:.4f}",
           started, 60)


def test_criterion_09_continuity():
    started = time.perf_counter()
    fam = [(DecorationFamily.limit_shifted(LAPLACE, 2.0 ** -r, 1.0), CANONICAL)
           for r in range(6)]
    rep = est.continuity_experiment(fam, (LAPLACE, CANONICAL), [-1.0, 0.0], 20.0, 2 * 10**5,
                                    tol=0.02, master_seed=SEED)
    gaps = {x: [f"{abs(r.gap):.4f}" for r in rep.rows if r.x == x] for x in (-1.0, 0.0)}
    ok = rep.verdict is est.Verdict.PASS and rep.g_identical
    record(9, ok, f"|gap| x=-1: {' '.join(gaps[-1.0])}; x=0: {' '.join(gaps[0.0])}; "
                  f"g bit-identical: {rep.g_identical}", started, 600)


def test_criterion_10_determinism(tmp_path, capsys):
    started = time.perf_counter()
    a, b = tmp_path / "a", tmp_path / "b"
    cli.main(["suite", "paper", "--seed", str(SEED), "--out", str(a)])
    cli.main(["suite", "paper", "--seed", str(SEED), "--out", str(b)])
    names = sorted(os.listdir(a))
    same = names == sorted(os.listdir(b)) and all(
        (a / n).read_bytes() == (b / n).read_bytes() for n in names)
    paper = cli.bundled_spec("paper")
    replays = [cli.main(["replay", str(a / n), paper]) for n in names]
    capsys.readouterr()
    ok = same and names and all(code == 0 for code in replays)
    record(10, ok, f"{len(names)} CSVs byte-identical: {same}; replays passed: "
                   f"{sum(c == 0 for c in replays)}/{len(replays)}", started, 1800)
