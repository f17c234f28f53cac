"""Experiment files: INI sections with flat dotted keys.

One section per experiment; the section name is the experiment name::

    [ballot_check]
    kind = survival
    ppp.rate_lambda = 50
    curve.kind = constant
    curve.value = 0
    decorations.kind = zero
    endpoints.x = -1
    endpoints.y = -1
    t = 2
    n = 1000000
    check.low = 0.632
    check.high = 0.70

Lists are comma separated. ``kind`` decides which keys are required and
which are allowed; anything else is rejected with the offending key named.
"""
from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from typing import Optional

from .curves import CurveSpec, PowerProfile, expression
from .errors import BarrierMCError, ConfigurationError
from .samplers import DecorationFamily, PppConfig

KINDS = ("survival", "fg", "asymptotic", "bound_scan", "repulsion", "continuity", "monotonicity")

_COMMON = {"kind", "ppp.rate_lambda", "n", "workers", "seed", "description"}
_CURVE = {"curve.kind", "curve.delta", "curve.value", "curve.with_one", "curve.plus",
          "curve.minus", "curve.blend", "curve.expr", "curve.limit_plus", "curve.limit_minus",
          "curve.reflect", "curve.table_points"}
_DECO = {"decorations.kind", "decorations.rate", "decorations.tail_delta", "decorations.base",
         "decorations.base_rate", "decorations.drift_scale", "decorations.decay_rate",
         "decorations.quantiles", "decorations.reflect"}
_CHECK = {"check.low", "check.high"}

_REQUIRED = {
    "survival": {"endpoints.x", "endpoints.y", "t"},
    "fg": {"side", "s", "endpoints.x"},
    "asymptotic": {"endpoints.x", "endpoints.y", "t_grid"},
    "bound_scan": {"x_list", "y_list", "t_list"},
    "repulsion": {"endpoints.x", "endpoints.y", "t", "M", "s_list"},
    "continuity": {"x_list", "s", "r_max", "shift"},
    "monotonicity": {"endpoints.x", "endpoints.y", "high.x", "high.y", "t"},
}
_OPTIONAL = {
    "survival": _CHECK | {"window.u1", "window.u2"},
    "fg": _CHECK,
    "asymptotic": {"s", "n_fg", "tol", "epsilon", "sensitivity"},
    "bound_scan": {"epsilon"},
    "repulsion": {"grid_step", "refine"},
    "continuity": {"tol", "decay"},
    "monotonicity": set(),
}
_DEFAULT_N = 100000


class SpecParseError(BarrierMCError):
    """Syntax error in an experiment file, with 1-based line and column."""

    def __init__(self, message, line, column=1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass
class ExperimentSpec:
    name: str
    kind: str
    ppp: PppConfig
    curve: CurveSpec
    decorations: DecorationFamily
    n: int
    params: dict = field(default_factory=dict)
    workers: int = 1
    master_seed: Optional[int] = None
    line: int = 0


def _column(text, line):
    lines = text.splitlines()
    if 1 <= line <= len(lines):
        raw = lines[line - 1]
        return len(raw) - len(raw.lstrip()) + 1
    return 1


def parse_text(text, source="<spec>"):
    """Parse experiment sections; raises :class:`SpecParseError` or
    :class:`ConfigurationError`."""
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",),
                                   comment_prefixes=("#", ";"), inline_comment_prefixes=("#",),
                                   empty_lines_in_values=False)
    cp.optionxform = str
    for i, raw in enumerate(text.splitlines(), 1):
        body = raw.strip()
        if body and raw[0] in " \t" and not body.startswith(("#", ";")):
            # configparser would silently glue this onto the previous value
            raise SpecParseError(f"unexpected indented line {body!r}", i, _column(text, i))
    try:
        cp.read_string(text, source=source)
    except configparser.MissingSectionHeaderError as exc:
        raise SpecParseError("expected a [section] header", exc.lineno,
                             _column(text, exc.lineno)) from None
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise SpecParseError(f"cannot parse {line.strip()!r} (expected key = value)", lineno,
                             _column(text, lineno)) from None
    except configparser.DuplicateOptionError as exc:
        raise SpecParseError(f"duplicate key {exc.option} in [{exc.section}]", exc.lineno,
                             _column(text, exc.lineno)) from None
    except configparser.DuplicateSectionError as exc:
        raise SpecParseError(f"duplicate section [{exc.section}]", exc.lineno,
                             _column(text, exc.lineno)) from None
    except configparser.Error as exc:
        raise SpecParseError(str(exc), 1) from None
    headers = {}
    for i, raw in enumerate(text.splitlines(), 1):
        m = re.match(r"\s*\[([^\]]+)\]", raw)
        if m:
            headers.setdefault(m.group(1).strip(), i)
    specs = [_build(name, dict(cp[name]), headers.get(name, 0)) for name in cp.sections()]
    if not specs:
        raise ConfigurationError("no experiment sections found", field="section")
    return specs


def load_specs(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigurationError(f"cannot read {path}: {exc.strerror}", field="spec_file") from None
    return parse_text(text, str(path))


def _float(sec, key, default=None, name=""):
    if key not in sec:
        if default is None:
            raise ConfigurationError(f"[{name}] missing required key {key}", field=key)
        return default
    try:
        return float(sec[key])
    except ValueError:
        raise ConfigurationError(f"[{name}] {key} = {sec[key]!r} is not a number",
                                 field=key) from None


def _int(sec, key, default=None, name=""):
    v = _float(sec, key, default, name)
    if v != int(v):
        raise ConfigurationError(f"[{name}] {key} must be an integer", field=key)
    return int(v)


def _bool(sec, key, default, name=""):
    if key not in sec:
        return default
    v = sec[key].strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(f"[{name}] {key} = {sec[key]!r} is not a boolean", field=key)


def _floats(sec, key, name=""):
    if key not in sec:
        raise ConfigurationError(f"[{name}] missing required key {key}", field=key)
    try:
        vals = [float(v) for v in sec[key].split(",") if v.strip()]
    except ValueError:
        raise ConfigurationError(f"[{name}] {key} must be a comma separated list of numbers",
                                 field=key) from None
    if not vals:
        raise ConfigurationError(f"[{name}] {key} is empty", field=key)
    return vals


def _profile(sec, key, name):
    vals = _floats(sec, key, name)
    if len(vals) > 3:
        raise ConfigurationError(f"[{name}] {key} takes level[, scale[, exponent]]", field=key)
    return PowerProfile(*vals)


def _curve(sec, name):
    kind = sec.get("curve.kind", "").strip()
    if not kind:
        raise ConfigurationError(f"[{name}] missing required key curve.kind", field="curve.kind")
    delta = _float(sec, "curve.delta", 0.25, name)
    if kind == "canonical_plus":
        c = CurveSpec.canonical_plus(delta, _bool(sec, "curve.with_one", True, name))
    elif kind == "constant":
        c = CurveSpec.constant(_float(sec, "curve.value", None, name), delta)
    elif kind == "limit_profile":
        c = CurveSpec.limit_profile(_profile(sec, "curve.plus", name),
                                    _profile(sec, "curve.minus", name), delta,
                                    sec.get("curve.blend", "split").strip())
    elif kind == "custom":
        if "curve.expr" not in sec:
            raise ConfigurationError(f"[{name}] custom curves need curve.expr", field="curve.expr")
        lp = sec.get("curve.limit_plus")
        lm = sec.get("curve.limit_minus")
        c = CurveSpec.custom(expression(sec["curve.expr"], ("t", "u")), delta,
                             expression(lp, ("u",)) if lp else None,
                             expression(lm, ("u",)) if lm else None,
                             _int(sec, "curve.table_points", 4097, name))
    else:
        raise ConfigurationError(f"[{name}] unknown curve kind {kind!r}", field="curve.kind")
    if _bool(sec, "curve.reflect", False, name):
        c = c.reflected()
    return c


def _simple_deco(kind, rate, tail_delta, quantiles, name, key):
    if kind == "zero":
        return DecorationFamily.zero(tail_delta or 0.5)
    if kind == "two_sided_exponential":
        return DecorationFamily.two_sided_exponential(rate, tail_delta)
    if kind == "custom_table":
        if quantiles is None:
            raise ConfigurationError(f"[{name}] custom_table needs decorations.quantiles",
                                     field="decorations.quantiles")
        return DecorationFamily.custom_table(quantiles, tail_delta or 0.5)
    raise ConfigurationError(f"[{name}] unknown decoration kind {kind!r}", field=key)


def _decorations(sec, name):
    kind = sec.get("decorations.kind", "").strip()
    if not kind:
        raise ConfigurationError(f"[{name}] missing required key decorations.kind",
                                 field="decorations.kind")
    td = _float(sec, "decorations.tail_delta", 0.0, name) or None
    q = _floats(sec, "decorations.quantiles", name) if "decorations.quantiles" in sec else None
    if kind == "limit_shifted":
        base_kind = sec.get("decorations.base", "").strip()
        if not base_kind:
            raise ConfigurationError(f"[{name}] limit_shifted needs decorations.base",
                                     field="decorations.base")
        base = _simple_deco(base_kind, _float(sec, "decorations.base_rate", 1.0, name), None, q,
                            name, "decorations.base")
        fam = DecorationFamily.limit_shifted(base, _float(sec, "decorations.drift_scale", 0.0, name),
                                             _float(sec, "decorations.decay_rate", 1.0, name), td)
    else:
        fam = _simple_deco(kind, _float(sec, "decorations.rate", 1.0, name), td, q, name,
                           "decorations.kind")
    if "decorations.reflect" in sec:
        fam = fam.reflected(_float(sec, "decorations.reflect", None, name))
    return fam


def _build(name, sec, line):
    kind = sec.get("kind", "").strip()
    if not kind:
        raise ConfigurationError(f"[{name}] missing required key kind", field="kind")
    if kind not in KINDS:
        raise ConfigurationError(f"[{name}] unknown experiment kind {kind!r}", field="kind")
    allowed = _COMMON | _CURVE | _DECO | _REQUIRED[kind] | _OPTIONAL[kind]
    for key in sec:
        if key not in allowed:
            raise ConfigurationError(f"[{name}] unexpected key {key} for kind {kind}", field=key)
    if "ppp.rate_lambda" not in sec:
        raise ConfigurationError(f"[{name}] missing required key ppp.rate_lambda",
                                 field="ppp.rate_lambda")
    for key in sorted(_REQUIRED[kind]):
        if key not in sec:
            raise ConfigurationError(f"[{name}] missing required key {key}", field=key)
    ppp = PppConfig(_float(sec, "ppp.rate_lambda", None, name))
    curve = _curve(sec, name)
    deco = _decorations(sec, name)
    n = _int(sec, "n", _DEFAULT_N, name)
    if n < 1:
        raise ConfigurationError(f"[{name}] n must be positive", field="n")
    workers = _int(sec, "workers", 1, name)
    if workers < 1:
        raise ConfigurationError(f"[{name}] workers must be positive", field="workers")
    seed = None
    if "seed" in sec:
        seed = _parse_seed(sec["seed"], "seed")

    p = {}
    for key in _REQUIRED[kind] | _OPTIONAL[kind]:
        if key not in sec:
            continue
        if key in ("side",):
            p[key] = sec[key].strip()
        elif key.endswith("_list") or key in ("t_grid", "sensitivity"):
            p[key] = _floats(sec, key, name)
        elif key in ("r_max", "refine", "n_fg"):
            p[key] = _int(sec, key, None, name)
        else:
            p[key] = _float(sec, key, None, name)
    if kind == "fg" and p["side"] not in ("start", "end"):
        raise ConfigurationError(f"[{name}] side must be start or end", field="side")
    if ("check.low" in p) != ("check.high" in p):
        raise ConfigurationError(f"[{name}] check.low and check.high go together",
                                 field="check.high" if "check.low" in p else "check.low")
    return ExperimentSpec(name, kind, ppp, curve, deco, n, p, workers, seed, line)


def _parse_seed(text, source):
    try:
        v = int(str(text).strip(), 0)
    except ValueError:
        raise ConfigurationError(f"seed {text!r} is not an integer", field=source) from None
    if not 0 <= v < 2**64:
        raise ConfigurationError(f"seed {v} is outside [0, 2**64)", field=source)
    return v
