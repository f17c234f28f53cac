import math

import numpy as np
import pytest

import fk_oracle
from barrier_mc import estimators as est
from barrier_mc.curves import CurveSpec, PowerProfile
from barrier_mc.errors import ConfigurationError, DomainError
from barrier_mc.oracles import BridgeEndpoints, ballot_survival
from barrier_mc.samplers import Bridge, DecorationFamily, Free, PathSample, PppConfig

SEED = 0x5EED
ZERO = DecorationFamily.zero()
LAPLACE = DecorationFamily.two_sided_exponential(1.0)
FLAT = CurveSpec.constant(0.0)


def experiment(curve=FLAT, deco=ZERO, lam=1.0, x=-1.0, y=-1.0, t=4.0):
    return est.BarrierExperiment(PppConfig(lam), curve, deco, x, y, t)


def test_indicator_q_examples():
    path = PathSample(np.array([1.0, 2.0]), np.array([-0.5, 0.2]), Bridge(0, 0, 3))
    assert not est.indicator_Q(path, FLAT, [0.0, 0.0])
    assert est.indicator_Q(path, FLAT, [0.0, 0.2])  # equality survives
    assert est.indicator_Q(path, FLAT, [0.0, 0.0], window=(0.0, 1.5))
    empty = PathSample(np.array([]), np.array([]), Bridge(0, 0, 3))
    assert est.indicator_Q(empty, FLAT, [])


def test_indicator_q_validation():
    free = PathSample(np.array([1.0]), np.array([0.0]), Free(0.0))
    with pytest.raises(DomainError):
        est.indicator_Q(free, FLAT, [0.0])
    assert est.indicator_Q(free, FLAT, [0.0], horizon_t=2.0)
    with pytest.raises(DomainError):
        est.indicator_Q(free, FLAT, [0.0, 1.0], horizon_t=2.0)


def test_unreachable_barrier_survives_surely():
    curve = CurveSpec.constant(1e9, delta=1e-9)
    e = est.estimate_survival(experiment(curve, LAPLACE, t=10.0), 10000, master_seed=SEED)
    assert e.value == 1.0 and e.std_error == 0.0


def test_envelope_is_enforced():
    with pytest.raises(ConfigurationError) as exc:
        est.estimate_survival(experiment(CurveSpec.constant(1e9)), 10000)
    assert exc.value.field == "curve"


def test_sample_size_floor():
    with pytest.raises(DomainError):
        est.estimate_survival(experiment(), 999)
    with pytest.raises(DomainError):
        est.estimate_survival(experiment(), 1500.5)


def test_horizon_needed():
    with pytest.raises(ConfigurationError):
        est.estimate_survival(experiment(t=None), 1000)


def test_determinism_and_seed_sensitivity():
    exp = experiment(CurveSpec.canonical_plus(0.25), LAPLACE, t=16.0)
    a = est.estimate_survival(exp, 20000, master_seed=SEED)
    b = est.estimate_survival(exp, 20000, master_seed=SEED)
    c = est.estimate_survival(exp, 20000, master_seed=SEED + 1)
    assert (a.value, a.std_error) == (b.value, b.std_error)
    assert a.value != c.value


def test_worker_count_does_not_change_results():
    exp = experiment(CurveSpec.canonical_plus(0.25), LAPLACE, t=16.0)
    a = est.survival_samples(exp, 5000, SEED, workers=1)
    b = est.survival_samples(exp, 5000, SEED, workers=4)
    np.testing.assert_array_equal(a, b)


def test_ci_shrinks_like_inverse_root_n():
    exp = experiment(lam=2.0, t=8.0)
    small = est.estimate_survival(exp, 40000, master_seed=SEED)
    big = est.estimate_survival(exp, 160000, master_seed=SEED)
    w = lambda e: e.ci()[1] - e.ci()[0]
    assert 0.45 <= w(big) / w(small) <= 0.55


def test_zero_decorations_dominate_ballot():
    exp = experiment(lam=3.0)
    e = est.estimate_survival(exp, 100000, master_seed=SEED)
    assert e.value >= ballot_survival(BridgeEndpoints(-1, -1, 4)) - 3 * e.std_error


@pytest.mark.parametrize("deco,cdf", [(ZERO, None), (LAPLACE, fk_oracle.laplace_cdf(1.0))])
def test_survival_against_feynman_kac(deco, cdf):
    x, y, t, lam = -1.0, -0.5, 4.0, 2.0
    want = fk_oracle.bridge_survival(x, y, t, lam, lambda u: 0.0 * u, cdf, dx=0.01, dt=2e-3)
    e = est.estimate_survival(experiment(FLAT, deco, lam, x, y, t), 200000, master_seed=SEED)
    assert abs(e.value - want) < 4 * e.std_error + 1e-3


def test_kernel_matches_reference_pipeline():
    exp = experiment(CurveSpec.canonical_plus(0.25), LAPLACE, lam=1.0, x=-0.5, y=-0.5, t=9.0)
    fast = est.estimate_survival(exp, 100000, master_seed=SEED)
    slow = est.estimate_survival_reference(exp, 4000, master_seed=SEED)
    assert abs(fast.value - slow.value) < 4 * math.hypot(fast.std_error, slow.std_error)


def test_time_reversal_preserves_survival():
    curve = CurveSpec.limit_profile(PowerProfile(0.5, 0.5, 0.25), PowerProfile(-0.5), 0.25)
    deco = DecorationFamily.limit_shifted(LAPLACE, 1.0, 0.5)
    exp = experiment(curve, deco, lam=1.5, x=-1.0, y=-2.0, t=6.0)
    rev = exp.time_reversed()
    assert (rev.x, rev.y) == (-2.0, -1.0)
    assert rev.time_reversed() == exp
    a = est.estimate_survival(exp, 200000, master_seed=SEED)
    b = est.estimate_survival(rev, 200000, master_seed=SEED + 1)
    assert abs(a.value - b.value) < 4 * math.hypot(a.std_error, b.std_error)


def test_fg_against_feynman_kac():
    want = fk_oracle.free_negative_part(-1.0, 1.0, 1.0, lambda u: 0.0 * u)
    e = est.estimate_fg(est.FgSide("start", 1.0, -1.0), experiment(t=None), 200000,
                        master_seed=SEED)
    assert abs(e.value - want) < 4 * e.std_error


def test_fg_laplace_against_feynman_kac():
    cdf = fk_oracle.laplace_cdf(1.0)
    want = fk_oracle.free_negative_part(0.0, 2.0, 1.0, lambda u: 0.0 * u, cdf)
    e = est.estimate_fg(est.FgSide("end", 2.0, 0.0), experiment(deco=LAPLACE, t=None), 200000,
                        master_seed=SEED)
    assert abs(e.value - want) < 4 * e.std_error


def test_fg_far_above_barrier_vanishes():
    exp = experiment(CurveSpec.canonical_plus(0.25), LAPLACE, t=None)
    e = est.estimate_fg(est.FgSide("start", 10.0, 1e6), exp, 10000, master_seed=SEED)
    assert e.value < 1e-3


def test_fg_symmetric_setup_gives_equal_sides():
    # flat curve and u-independent decorations: f and g have the same law
    exp = experiment(FLAT, LAPLACE, t=None)
    f = est.estimate_fg(est.FgSide("start", 5.0, -1.0), exp, 100000, master_seed=SEED)
    g = est.estimate_fg(est.FgSide("end", 5.0, -1.0), exp, 100000, master_seed=SEED)
    assert abs(f.value - g.value) < 4 * math.hypot(f.std_error, g.std_error)


def test_fg_validation():
    with pytest.raises(ConfigurationError):
        est.FgSide("middle", 1.0, 0.0)
    with pytest.raises(DomainError):
        est.FgSide("start", 0.0, 0.0)
    custom = CurveSpec.custom(lambda t, u: 0.0, 0.25)
    with pytest.raises(ConfigurationError):
        est.estimate_fg(est.FgSide("start", 1.0, 0.0), experiment(custom, t=None), 1000)


def test_range_region():
    r = est.RangeRegion(0.1)
    assert r.contains(-1, -1, 16)
    assert not r.contains(-10, -10, 16)
    assert not r.contains(11, 0, 1e6)
    with pytest.raises(ConfigurationError) as exc:
        r.require(-10, -10, 16)
    assert exc.value.field == "R_eps"


def test_asymptotic_region_error_names_field():
    with pytest.raises(ConfigurationError) as exc:
        est.check_asymptotic(experiment(t=None), -10, -10, [16.0], s=4.0, n=1000)
    assert exc.value.field == "R_eps"


def test_asymptotic_small_n_is_inconclusive():
    exp = experiment(CurveSpec.canonical_plus(0.25), LAPLACE, t=None)
    rep = est.check_asymptotic(exp, -1.0, -1.0, [16.0, 64.0], s=10.0, n=1000, n_fg=1000,
                               sensitivity=(), master_seed=SEED)
    assert rep.verdict is est.Verdict.INCONCLUSIVE
    assert len(rep.rows) == 2 and rep.rows[0].t == 16.0


def test_asymptotic_grid_validation():
    with pytest.raises(ConfigurationError):
        est.check_asymptotic(experiment(t=None), -1, -1, [64.0, 16.0], n=1000)


def test_bound_scan_single_cell():
    exp = experiment(CurveSpec.canonical_plus(0.25), LAPLACE, t=None)
    scan = est.scan_bound_constant(exp, est.RangeRegion(0.1), [-1.0], [0.0], [16.0], 10000,
                                   master_seed=SEED)
    (cell,) = scan.cells
    assert cell.ratio == pytest.approx(16 * cell.survival.value / 2)
    assert cell.normalized is not None
    assert scan.c_hat == pytest.approx(cell.ratio + 3 * cell.ratio_se)
    with pytest.raises(DomainError):
        scan.trend(-1.0, 0.0)


def test_bound_normalization_reduces_for_nonpositive():
    assert est.bound_normalization(-2, -3, 10, 1.0, 0.25) == pytest.approx(
        3 * 4 * math.exp(0.05) / 10)


def test_repulsion_huge_margin_is_certain():
    exp = experiment(CurveSpec.canonical_plus(0.25), LAPLACE, t=64.0)
    r = est.estimate_repulsion(exp, est.RepulsionConfig(1e6, 8.0), 20000, master_seed=SEED)
    assert r.value == pytest.approx(1.0) and r.status is est.Verdict.NA


def test_repulsion_half_horizon_is_allowed():
    exp = experiment(CurveSpec.canonical_plus(0.25), LAPLACE, t=16.0)
    r = est.estimate_repulsion(exp, est.RepulsionConfig(1.0, 8.0), 20000, master_seed=SEED)
    assert 0.0 <= r.value <= 1.0 and math.isfinite(r.std_error)


def test_repulsion_range_of_s():
    with pytest.raises(DomainError):
        est.RepulsionConfig(1.0, 2.0)
    with pytest.raises(DomainError):
        est.estimate_repulsion(experiment(t=16.0), est.RepulsionConfig(1.0, 8.5), 1000)


def test_repulsion_config_validation():
    with pytest.raises(ConfigurationError):
        est.RepulsionConfig(0.5, 4.0)
    with pytest.raises(ConfigurationError):
        est.RepulsionConfig(1.0, 4.0, grid_step=2.0)
    with pytest.raises(ConfigurationError):
        est.RepulsionConfig(1.0, 4.0, refine=0)


def test_repulsion_refinement_agrees():
    exp = experiment(CurveSpec.canonical_plus(0.25), LAPLACE, t=32.0)
    a = est.estimate_repulsion(exp, est.RepulsionConfig(1.0, 4.0), 50000, master_seed=SEED)
    b = est.estimate_repulsion(exp, est.RepulsionConfig(1.0, 4.0, refine=4), 50000,
                               master_seed=SEED)
    assert abs(a.value - b.value) < 3 * a.std_error


def test_continuity_constant_family():
    member = (LAPLACE, FLAT)
    rep = est.continuity_experiment([member, member], member, [-1.0], 5.0, 5000,
                                    master_seed=SEED)
    assert rep.verdict is est.Verdict.PASS and rep.g_identical
    assert all(r.gap == 0.0 for r in rep.rows)


def test_continuity_shrinking_shift():
    fam = [(DecorationFamily.limit_shifted(LAPLACE, 2.0 ** -r, 1.0), FLAT) for r in range(4)]
    rep = est.continuity_experiment(fam, (LAPLACE, FLAT), [-1.0], 5.0, 20000,
                                    master_seed=SEED)
    gaps = [abs(r.gap) for r in rep.rows]
    assert gaps == sorted(gaps, reverse=True)
    assert rep.g_identical  # the end side only sees the limit law


def test_continuity_delta_mismatch():
    other = CurveSpec.constant(0.0, delta=0.2)
    with pytest.raises(ConfigurationError) as exc:
        est.continuity_experiment([(LAPLACE, other)], (LAPLACE, FLAT), [0.0], 5.0, 1000)
    assert exc.value.field == "family.delta"


def test_monotonicity_identical_endpoints():
    exp = experiment(CurveSpec.canonical_plus(0.25), LAPLACE, t=16.0)
    rep = est.monotonicity_coupled(exp, (-1.0, -1.0), (-1.0, -1.0), 5000, master_seed=SEED)
    assert rep.identical and rep.violations == 0


def test_monotonicity_ordering():
    exp = experiment(CurveSpec.canonical_plus(0.25), LAPLACE, t=16.0)
    rep = est.monotonicity_coupled(exp, (-2.0, -2.0), (0.0, 0.0), 20000, master_seed=SEED)
    assert rep.violations == 0 and rep.low.value > rep.high.value
    with pytest.raises(DomainError):
        est.monotonicity_coupled(exp, (0.0, 0.0), (-1.0, 1.0), 1000)


def test_bridge_crossing_corrected_is_unbiased():
    e = est.estimate_bridge_crossing(0.0, 0.0, 1.0, 1.0, 2.0, 50000, 20, master_seed=SEED)
    assert abs(e.value - math.exp(-1)) < 4 * e.std_error
    raw = est.estimate_bridge_crossing(0.0, 0.0, 1.0, 1.0, 2.0, 50000, 20, corrected=False,
                                       master_seed=SEED)
    assert raw.value < e.value


def test_threads_validation():
    with pytest.raises(ConfigurationError):
        est.estimate_survival(experiment(), 1000, workers=0)


def test_dense_observation_gap_at_lambda_50():
    # the discrete-observation survival exceeds the continuous ballot value by ~0.07
    exp = experiment(lam=50.0, t=2.0)
    want = fk_oracle.bridge_survival(-1.0, -1.0, 2.0, 50.0, lambda u: 0.0 * u)
    coarse = fk_oracle.bridge_survival(-1.0, -1.0, 2.0, 50.0, lambda u: 0.0 * u, dx=0.02,
                                       dt=2e-3)
    assert abs(want - coarse) < 1e-4
    assert want > 0.70
    e = est.estimate_survival(exp, 10**6, master_seed=SEED)
    assert abs(e.value - want) < 4 * e.std_error + 1e-4
