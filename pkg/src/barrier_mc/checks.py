"""Fast self-checks behind ``barrier-mc suite unit``.

Each check returns ``(name, ok, detail)``. Monte Carlo checks use 5-sigma
bands so that a correct build fails with negligible probability.
"""
from __future__ import annotations

import math

import numpy as np

from . import kernels, oracles
from .curves import CurveSpec, validate_envelope, validate_regularity
from .estimators import (BarrierExperiment, DEFAULT_SEED, estimate_bridge_crossing,
                         estimate_survival)
from .rng import RngStream, philox4x32, split_seed
from .samplers import DecorationFamily, PppConfig, sample_bridge_paths

# Random123 known-answer vectors for Philox4x32-10: (key, counter, output)
PHILOX_KAT = (
    ((0, 0), (0, 0, 0, 0), (0x6627E8D5, 0xE169C58D, 0xBC57AC4C, 0x9B00DBD8)),
    ((0xFFFFFFFF, 0xFFFFFFFF), (0xFFFFFFFF,) * 4, (0x408F276D, 0x41C83B0E, 0xA20BC7C6, 0x6D5451FD)),
    ((0xA4093822, 0x299F31D0), (0x243F6A88, 0x85A308D3, 0x13198A2E, 0x03707344),
     (0xD16CFE09, 0x94FDCCEB, 0x5001E420, 0x24126EA1)),
)


def check_philox():
    for key, ctr, want in PHILOX_KAT:
        got = philox4x32(*(np.uint64(v) for v in key + ctr))
        if tuple(int(g) for g in got) != want:
            return "philox known answers", False, f"key={key} ctr={ctr}"
    return "philox known answers", True, "3 vectors"


def check_oracles():
    b = oracles.ballot_survival(oracles.BridgeEndpoints(-1.0, -1.0, 2.0))
    r = oracles.bridge_max_tail(1.0, 2.0)
    ok = abs(b - (1 - math.exp(-1))) < 1e-15 and abs(r - math.exp(-1)) < 1e-15
    return "closed forms", ok, f"ballot={b:.15f} reflection={r:.15f}"


def check_bridge_marginal(n=200000):
    paths = sample_bridge_paths(0.0, 0.0, 4.0, [2.0], RngStream(DEFAULT_SEED, 99), n)
    m, v = paths[:, 0].mean(), paths[:, 0].var(ddof=1)
    se_m, se_v = math.sqrt(1.0 / n), math.sqrt(2.0 / n)
    ok = abs(m) < 5 * se_m and abs(v - 1.0) < 5 * se_v
    return "bridge marginal", ok, f"mean={m:.5f} var={v:.5f}"


def check_arrivals(n=200000, t=3.0, lam=2.0):
    k0, k1 = split_seed(DEFAULT_SEED)
    c = kernels.arrival_counts(n, k0, k1, np.uint64(98), t, lam, 0)
    mu = lam * t
    ok = abs(c.mean() - mu) < 5 * math.sqrt(mu / n) and abs(c.var() / mu - 1) < 0.05
    return "poisson counts", ok, f"mean={c.mean():.4f} var={c.var():.4f} (both {mu:g})"


def check_reflection(n=100000):
    e = estimate_bridge_crossing(0.0, 0.0, 1.0, 1.0, 2.0, n, 200)
    want = math.exp(-1)
    ok = abs(e.value - want) < 5 * e.std_error
    return "corrected crossing", ok, f"{e.value:.5f} +- {e.std_error:.5f} vs {want:.5f}"


def check_curves():
    ok_c, _ = validate_envelope(CurveSpec.canonical_plus(0.25), 100.0)
    bad, _ = validate_envelope(CurveSpec.constant(1e9), 100.0)
    reg, _ = validate_regularity(CurveSpec.constant(0.0), 100.0)
    return "curve validators", ok_c and not bad and reg, "canonical ok, huge constant rejected"


def check_tails():
    ok1, _ = DecorationFamily.two_sided_exponential(1.0).satisfies_tail_bound()
    ok2, _ = DecorationFamily.two_sided_exponential(0.1, tail_delta=0.5).satisfies_tail_bound()
    return "decoration tails", ok1 and not ok2, "rate 1 ok at 1/2, rate 0.1 rejected at 1/2"


def check_dense_ballot(n=100000):
    exp = BarrierExperiment(PppConfig(50.0), CurveSpec.constant(0.0), DecorationFamily.zero(),
                            -1.0, -1.0, 2.0)
    e = estimate_survival(exp, n)
    want = oracles.ballot_survival(exp.endpoints)
    ok = e.value >= want - 5 * e.std_error
    return "dense ballot", ok, f"{e.value:.5f} +- {e.std_error:.5f} above {want:.5f}"


UNIT_CHECKS = (check_philox, check_oracles, check_bridge_marginal, check_arrivals,
               check_reflection, check_curves, check_tails, check_dense_ballot)


def run_unit_checks():
    return [c() for c in UNIT_CHECKS]
