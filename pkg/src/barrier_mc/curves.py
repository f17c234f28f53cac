"""Barrier curves gamma_{t,u}, the wedge function and their validators.

Four families are available:

``canonical_plus``
    ``u -> (1 + wedge(t, u) ** (1/2 - delta)) / delta``, the largest curve
    allowed by the envelope condition. ``with_one=False`` drops the ``1``.
``constant``
    ``u -> c``.
``limit_profile``
    Built from two power profiles ``g(v) = level + scale * v ** exponent``,
    one for each end: ``g_plus(u)`` near 0 and ``g_minus(t - u)`` near t,
    glued at the midpoint (``blend="split"``) or combined by a pointwise
    minimum (``blend="min"``). Its limits are ``g_plus`` and ``g_minus``.
``custom``
    Any Python callable ``f(t, u)``, with optional callables for the two
    limits. The simulation kernels see custom curves through a piecewise
    linear table (``table_points`` nodes on ``[0, t]``).
"""
from __future__ import annotations

import ast
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import kernels
from .errors import ConfigurationError, DomainError

DEFAULT_ENVELOPE_POINTS = 1001
DEFAULT_REGULARITY_POINTS = 50
DEFAULT_TABLE_POINTS = 4097
_SLACK = 1e-12


def wedge(t, u):
    """Distance from ``u`` to the nearer end of ``[0, t]``: ``min(u, t - u)``."""
    t = float(t)
    u_arr = np.asarray(u, dtype=float)
    if t < 0 or np.any(u_arr < 0) or np.any(u_arr > t):
        raise DomainError(f"wedge needs 0 <= u <= t, got t={t}, u={u}")
    out = np.minimum(u_arr, t - u_arr)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PowerProfile:
    """``v -> level + scale * v ** exponent`` for ``v >= 0``."""

    level: float
    scale: float = 0.0
    exponent: float = 0.0

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            powered = np.where(v > 0, np.power(np.maximum(v, 0.0), self.exponent),
                               1.0 if self.exponent == 0 else 0.0)
        out = self.level + self.scale * powered
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CurveSpec:
    kind: str
    delta: float
    value: float = 0.0
    with_one: bool = True
    plus: Optional[PowerProfile] = None
    minus: Optional[PowerProfile] = None
    blend: str = "split"
    func: Optional[Callable] = field(default=None, compare=False)
    limit_plus: Optional[Callable] = field(default=None, compare=False)
    limit_minus: Optional[Callable] = field(default=None, compare=False)
    reflect: bool = False
    table_points: int = DEFAULT_TABLE_POINTS

    def __post_init__(self):
        if not 0.0 < self.delta < 0.5:
            raise ConfigurationError(f"curve delta must lie in (0, 1/2), got {self.delta}",
                                     field="curve.delta")
        if self.kind not in ("canonical_plus", "constant", "limit_profile", "custom"):
            raise ConfigurationError(f"unknown curve kind {self.kind!r}", field="curve.kind")
        if self.kind == "limit_profile":
            if self.plus is None or self.minus is None:
                raise ConfigurationError("limit_profile needs both profiles", field="curve.plus")
            if self.blend not in ("split", "min"):
                raise ConfigurationError(f"unknown blend rule {self.blend!r}", field="curve.blend")
        if self.kind == "custom" and not callable(self.func):
            raise ConfigurationError("custom curve needs a callable f(t, u)", field="curve.expr")

    @classmethod
    def canonical_plus(cls, delta, with_one=True):
        return cls("canonical_plus", delta, with_one=with_one)

    @classmethod
    def constant(cls, value, delta=0.25):
        return cls("constant", delta, value=float(value))

    @classmethod
    def limit_profile(cls, plus, minus, delta, blend="split"):
        return cls("limit_profile", delta, plus=plus, minus=minus, blend=blend)

    @classmethod
    def custom(cls, func, delta, limit_plus=None, limit_minus=None,
               table_points=DEFAULT_TABLE_POINTS):
        return cls("custom", delta, func=func, limit_plus=limit_plus,
                   limit_minus=limit_minus, table_points=table_points)

    def reflected(self):
        """The curve ``u -> gamma_{t, t-u}``."""
        return replace(self, reflect=not self.reflect)

    @property
    def has_limits(self):
        return self.kind != "custom" or (self.limit_plus is not None and self.limit_minus is not None)

    def describe(self):
        if self.kind == "canonical_plus":
            s = f"canonical_plus(delta={self.delta:g}{'' if self.with_one else ', no +1'})"
        elif self.kind == "constant":
            s = f"constant({self.value:g})"
        elif self.kind == "limit_profile":
            s = f"limit_profile({self.plus}, {self.minus}, {self.blend})"
        else:
            s = f"custom({getattr(self.func, '__name__', 'f')})"
        return s + (" reflected" if self.reflect else "")


def _raw_eval(c, t, u):
    u = np.asarray(u, dtype=float)
    if c.kind == "canonical_plus":
        w = np.minimum(u, t - u)
        with np.errstate(invalid="ignore"):
            grown = np.where(w > 0, np.power(np.maximum(w, 0.0), 0.5 - c.delta), 0.0)
        return ((1.0 if c.with_one else 0.0) + grown) / c.delta
    if c.kind == "constant":
        return np.full_like(u, c.value)
    if c.kind == "limit_profile":
        gp = np.asarray(c.plus(u), dtype=float)
        gm = np.asarray(c.minus(t - u), dtype=float)
        if c.blend == "min":
            return np.minimum(gp, gm)
        return np.where(u <= 0.5 * t, gp, gm)
    return np.asarray(np.vectorize(c.func, otypes=[float])(t, u), dtype=float)


def eval_curve(c: CurveSpec, t, u):
    """gamma_{t,u}; ``u`` may be a scalar or an array within ``[0, t]``."""
    t = float(t)
    u_arr = np.asarray(u, dtype=float)
    if t < 0 or np.any(u_arr < 0) or np.any(u_arr > t) or np.any(np.isnan(u_arr)):
        raise DomainError(f"curve evaluation needs 0 <= u <= t, got t={t}, u={u}")
    if c.reflect:
        u_arr = t - u_arr
    out = _raw_eval(c, t, u_arr)
    return float(out) if out.ndim == 0 else out


def curve_limits(c: CurveSpec, u):
    """``(gamma_{inf,u}, gamma_{inf,-u})`` at ``u >= 0``."""
    u = float(u)
    if u < 0:
        raise DomainError(f"limit argument must be non-negative, got {u}")
    if c.kind == "canonical_plus":
        v = ((1.0 if c.with_one else 0.0) + (u ** (0.5 - c.delta) if u > 0 else 0.0)) / c.delta
        plus = minus = v
    elif c.kind == "constant":
        plus = minus = c.value
    elif c.kind == "limit_profile":
        plus, minus = float(c.plus(u)), float(c.minus(u))
    else:
        if not c.has_limits:
            raise ConfigurationError("custom curve has no declared limits", field="curve.limits")
        plus, minus = float(c.limit_plus(u)), float(c.limit_minus(u))
    if c.reflect:
        plus, minus = minus, plus
    return plus, minus


def envelope_upper(delta, t, u, with_one=True):
    w = np.minimum(u, t - u)
    with np.errstate(invalid="ignore"):
        grown = np.where(w > 0, np.power(np.maximum(w, 0.0), 0.5 - delta), 0.0)
    return ((1.0 if with_one else 0.0) + grown) / delta


def validate_envelope(c: CurveSpec, t, grid=None):
    """Check ``-1/delta <= gamma_{t,u} <= (1 + wedge^(1/2-delta))/delta`` on a grid.

    Returns ``(ok, violation)`` where ``violation`` is the first offending
    ``(u, gamma)`` pair, or ``None``.
    """
    t = float(t)
    if t <= 0:
        raise DomainError(f"horizon must be positive, got {t}")
    grid = np.linspace(0.0, t, DEFAULT_ENVELOPE_POINTS) if grid is None else np.asarray(grid, float)
    values = np.atleast_1d(eval_curve(c, t, grid))
    upper = envelope_upper(c.delta, t, grid)
    lower = -1.0 / c.delta
    tol = _SLACK * np.maximum(1.0, np.abs(upper))
    bad = (values < lower - tol) | (values > upper + tol) | ~np.isfinite(values)
    if np.any(bad):
        i = int(np.argmax(bad))
        return False, (float(grid[i]), float(values[i]))
    return True, None


def default_triples(t, points=DEFAULT_REGULARITY_POINTS):
    """All ordered triples u < r < u' from an interior lattice of ``points`` nodes."""
    nodes = np.linspace(0.0, t, points + 2)[1:-1]
    i, j, k = np.meshgrid(np.arange(points), np.arange(points), np.arange(points), indexing="ij")
    mask = (i < j) & (j < k)
    return np.stack([nodes[i[mask]], nodes[j[mask]], nodes[k[mask]]], axis=1)


def validate_regularity(c: CurveSpec, t, triples=None):
    """Check the two regularity inequalities for every ``(u, r, u')`` triple.

    ``gamma_u - (u/r) gamma_r <= (1 + wedge_r(u)^(1/2-delta)) / delta`` and
    ``gamma_u' - ((t-u')/(t-r)) gamma_r <= (1 + wedge_{t-r}(u'-r)^(1/2-delta)) / delta``.
    Returns ``(ok, violation)`` with the first failing triple and which
    inequality failed.
    """
    t = float(t)
    if t <= 0:
        raise DomainError(f"horizon must be positive, got {t}")
    tri = default_triples(t) if triples is None else np.asarray(triples, dtype=float).reshape(-1, 3)
    if tri.size == 0:
        return True, None
    u, r, up = tri[:, 0], tri[:, 1], tri[:, 2]
    if np.any(~((0 < u) & (u < r) & (r < up) & (up < t))):
        raise DomainError("regularity triples need 0 < u < r < u' < t")
    gu = np.atleast_1d(eval_curve(c, t, u))
    gr = np.atleast_1d(eval_curve(c, t, r))
    gup = np.atleast_1d(eval_curve(c, t, up))
    rhs1 = envelope_upper(c.delta, r, u)
    rhs2 = envelope_upper(c.delta, t - r, up - r)
    lhs1 = gu - (u / r) * gr
    lhs2 = gup - ((t - up) / (t - r)) * gr
    bad1 = lhs1 > rhs1 + _SLACK * np.maximum(1.0, np.abs(rhs1))
    bad2 = lhs2 > rhs2 + _SLACK * np.maximum(1.0, np.abs(rhs2))
    bad = bad1 | bad2
    if np.any(bad):
        i = int(np.argmax(bad))
        which = 1 if bad1[i] else 2
        return False, (tuple(float(v) for v in tri[i]), which)
    return True, None


def encode_curve(c: CurveSpec, t=None):
    """Float parameter array and table for the kernels' ``curve_at``.

    Custom curves are tabulated on ``[0, t]``, so ``t`` is required for them.
    """
    cp = np.zeros(kernels.CURVE_PARAMS)
    cp[1] = c.delta
    cp[3] = 1.0 if c.reflect else 0.0
    tab = np.zeros(1)
    if c.kind == "canonical_plus":
        cp[0] = kernels.CANONICAL
        cp[2] = 1.0 if c.with_one else 0.0
    elif c.kind == "constant":
        cp[0] = kernels.CONSTANT
        cp[2] = c.value
    elif c.kind == "limit_profile":
        cp[0] = kernels.PROFILE
        cp[4:7] = (c.plus.level, c.plus.scale, c.plus.exponent)
        cp[7:10] = (c.minus.level, c.minus.scale, c.minus.exponent)
        cp[10] = 1.0 if c.blend == "min" else 0.0
    else:
        if t is None:
            raise ConfigurationError("custom curves need a horizon to be tabulated")
        cp[0] = kernels.TABLE
        cp[3] = 0.0
        cp[11] = float(t)
        tab = np.atleast_1d(eval_curve(c, t, np.linspace(0.0, t, c.table_points))).astype(float)
    return cp, tab


def encode_limit(c: CurveSpec, horizon):
    """Kernel encoding for the kernels' ``limit_at`` on ``[0, horizon]``.

    For custom curves the two limit functions are tabulated separately; the
    returned pair covers the start side and the end side respectively.
    """
    if not c.has_limits:
        raise ConfigurationError("custom curve has no declared limits", field="curve.limits")
    if c.kind != "custom":
        enc = encode_curve(c)
        return enc, enc
    grid = np.linspace(0.0, float(horizon), c.table_points)
    sides = []
    for minus in (False, True):
        cp = np.zeros(kernels.CURVE_PARAMS)
        cp[0] = kernels.TABLE
        cp[1] = c.delta
        cp[11] = float(horizon)
        tab = np.array([curve_limits(c, g)[1 if minus else 0] for g in grid])
        sides.append((cp, tab))
    return sides[0], sides[1]


_ALLOWED = {"abs": np.abs, "minimum": np.minimum, "maximum": np.maximum, "min": np.minimum,
            "max": np.maximum, "sqrt": np.sqrt, "exp": np.exp, "log": np.log,
            "where": np.where, "pi": np.pi}
_NODES = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Call, ast.Name, ast.Load,
          ast.Constant, ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd,
          ast.Compare, ast.Lt, ast.LtE, ast.Gt, ast.GtE, ast.Mod, ast.FloorDiv)


def expression(source, names):
    """Compile a small arithmetic expression over ``names`` into a callable.

    Only arithmetic, comparisons and a handful of numpy functions are
    accepted; used for custom curves in experiment files.
    """
    try:
        tree = ast.parse(source, mode="eval")
    except SyntaxError as exc:
        raise ConfigurationError(f"cannot parse expression {source!r}: {exc.msg}") from None
    for node in ast.walk(tree):
        if not isinstance(node, _NODES):
            raise ConfigurationError(f"unsupported syntax in expression {source!r}")
        if isinstance(node, ast.Name) and node.id not in names and node.id not in _ALLOWED:
            raise ConfigurationError(f"unknown name {node.id!r} in expression {source!r}")
    code = compile(tree, "<curve>", "eval")

    def fn(*args):
        scope = dict(_ALLOWED)
        scope.update(zip(names, args))
        return eval(code, {"__builtins__": {}}, scope)

    fn.__name__ = source
    return fn
