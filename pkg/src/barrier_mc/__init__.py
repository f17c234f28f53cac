"""Monte Carlo for Poisson-observed Brownian bridges staying below barrier curves."""
from .curves import (CurveSpec, PowerProfile, curve_limits, encode_curve, eval_curve,
                     validate_envelope, validate_regularity, wedge)
from .errors import BarrierMCError, ConfigurationError, DomainError
from .estimators import (DEFAULT_SEED, AsymptoticReport, BarrierExperiment, BoundScan,
                         ContinuityReport, Estimate, FgSide, MonotonicityReport, RangeRegion,
                         RepulsionConfig, RepulsionEstimate, Verdict, check_asymptotic,
                         continuity_experiment, estimate_bridge_crossing, estimate_fg,
                         estimate_repulsion, estimate_survival, indicator_Q, monotonicity_coupled,
                         scan_bound_constant)
from .oracles import (BridgeEndpoints, ballot_survival, bridge_marginal, bridge_max_tail,
                      segment_crossing_prob)
from .rng import RngStream
from .samplers import (LIMIT, ArrivalTimes, DecorationFamily, PathSample, PppConfig,
                       sample_bm, sample_bridge, sample_decorations, sample_ppp)

__version__ = "0.1.0"
