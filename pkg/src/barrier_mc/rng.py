"""Counter-based random streams.

Every draw in the package is a pure function of a key and a counter,
evaluated with the Philox4x32-10 block cipher of Salmon et al. (the Random123
family). Nothing is stateful except the position of a sequential
:class:`RngStream`, so any draw can be recomputed in isolation.

Key and counter layout
----------------------
``key = (master_seed mod 2**32, master_seed >> 32)``

``counter = (block, lane, stream_id, purpose << 24 | sub)``

* ``lane = 0`` is the sequential lane used by :class:`RngStream`; ``block``
  is its running position (overflow above 2**32 goes to the last word).
* Monte Carlo replica ``i`` owns ``lane = i + 1``. Inside a replica, ``block``,
  ``purpose`` and ``sub`` address draws by role (arrival index, grid index,
  ...; see :mod:`barrier_mc.kernels`). Two experiments that share a seed
  therefore share the random numbers attached to each role, which is what the
  common-random-number couplings rely on, and results do not depend on how
  replicas are scheduled across workers.

A block yields four 32-bit words, combined pairwise into two uniforms
``(k + 1/2) / 2**52`` with ``k`` made of the top 26 bits of each word, so
every uniform lies in ``[2**-53, 1 - 2**-53]``. Gaussians invert the normal
cdf with Wichura's AS241 (PPND16) rational approximation, which is
deterministic and accurate to about 1e-16.
"""
from __future__ import annotations

import math

import numba as nb
import numpy as np

from .errors import DomainError

_M32 = np.uint64(0xFFFFFFFF)
_S32 = np.uint64(32)
_S24 = np.uint64(24)
_S6 = np.uint64(6)
_PHILOX_M0 = np.uint64(0xD2511F53)
_PHILOX_M1 = np.uint64(0xCD9E8D57)
_PHILOX_W0 = np.uint64(0x9E3779B9)
_PHILOX_W1 = np.uint64(0xBB67AE85)
_U52 = 1.0 / 4503599627370496.0

SEED_MAX = 2**64 - 1
STREAM_MAX = 2**32 - 1


@nb.njit(cache=True)
def philox4x32(k0, k1, c0, c1, c2, c3):
    """One Philox4x32-10 block. Arguments and results are uint64 holding 32-bit words."""
    for r in range(10):
        if r > 0:
            k0 = (k0 + _PHILOX_W0) & _M32
            k1 = (k1 + _PHILOX_W1) & _M32
        p0 = _PHILOX_M0 * c0
        p1 = _PHILOX_M1 * c2
        c0, c1, c2, c3 = (p1 >> _S32) ^ c1 ^ k0, p1 & _M32, (p0 >> _S32) ^ c3 ^ k1, p0 & _M32
    return c0, c1, c2, c3


@nb.njit(cache=True, inline="always")
def tag(purpose, sub):
    return (np.uint64(purpose) << _S24) | np.uint64(sub)


@nb.njit(cache=True, inline="always")
def _unit(a, b):
    # k + 1/2 with k < 2**52 is exact, so the result never rounds to 0 or 1
    return (float(a >> _S6) * 67108864.0 + float(b >> _S6) + 0.5) * _U52


@nb.njit(cache=True)
def uniform_pair(k0, k1, c0, c1, c2, c3):
    """Two uniforms in (0, 1) from the block at the given counter."""
    a, b, c, d = philox4x32(k0, k1, c0, c1, c2, c3)
    return _unit(a, b), _unit(c, d)


@nb.njit(cache=True)
def ndtri(p):
    """Inverse standard normal cdf (Wichura 1988, algorithm AS241 PPND16)."""
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        num = (((((((2509.0809287301226727 * r + 33430.575583588128105) * r
                    + 67265.770927008700853) * r + 45921.953931549871457) * r
                  + 13731.693765509461125) * r + 1971.5909503065514427) * r
                + 133.14166789178437745) * r + 3.387132872796366608)
        den = (((((((5226.495278852545925 * r + 28729.085735721942674) * r
                    + 39307.89580009271061) * r + 21213.794301586595867) * r
                  + 5394.1960214247511077) * r + 687.1870074920579083) * r
                + 42.313330701600911252) * r + 1.0)
        return q * num / den
    r = p if q < 0.0 else 1.0 - p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r -= 1.6
        num = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r
                    + 0.24178072517745061177) * r + 1.27045825245236838258) * r
                  + 3.64784832476320460504) * r + 5.7694972214606914055) * r
                + 4.6303378461565452959) * r + 1.42343711074968357734)
        den = (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r
                    + 0.0151986665636164571966) * r + 0.14810397642748007459) * r
                  + 0.68976733498510000455) * r + 1.6763848301838038494) * r
                + 2.05319162663775882187) * r + 1.0)
    else:
        r -= 5.0
        num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r
                    + 0.0012426609473880784386) * r + 0.026532189526576123093) * r
                  + 0.29656057182850489123) * r + 1.7848265399172913358) * r
                + 5.4637849111641143699) * r + 6.6579046435011037772)
        den = (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r
                    + 1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r
                  + 0.0148753612908506148525) * r + 0.13692988092273580531) * r
                + 0.59983220655588793769) * r + 1.0)
    val = num / den
    return -val if q < 0.0 else val


@nb.njit(cache=True)
def _fill_words(k0, k1, stream, start, out):
    zero = np.uint64(0)
    n = out.shape[0]
    b = start
    for i in range(0, n, 4):
        w = philox4x32(k0, k1, b & _M32, zero, stream, b >> _S32)
        for j in range(4):
            if i + j < n:
                out[i + j] = w[j]
        b += np.uint64(1)
    return b


@nb.njit(cache=True)
def _fill_uniform(k0, k1, stream, start, out):
    zero = np.uint64(0)
    n = out.shape[0]
    b = start
    for i in range(0, n, 2):
        u, v = uniform_pair(k0, k1, b & _M32, zero, stream, b >> _S32)
        out[i] = u
        if i + 1 < n:
            out[i + 1] = v
        b += np.uint64(1)
    return b


@nb.njit(cache=True)
def _ndtri_inplace(u):
    for i in range(u.shape[0]):
        u[i] = ndtri(u[i])


def _check_int(value, name, upper):
    if isinstance(value, (bool, np.bool_)) or not isinstance(value, (int, np.integer)):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < 0 or value > upper:
        raise DomainError(f"{name} must lie in [0, {upper}], got {value}")
    return value


def split_seed(master_seed: int) -> tuple[np.uint64, np.uint64]:
    """Philox key words for a 64-bit master seed."""
    seed = _check_int(master_seed, "master_seed", SEED_MAX)
    return np.uint64(seed & 0xFFFFFFFF), np.uint64(seed >> 32)


class RngStream:
    """Sequential view of the Philox stream ``(master_seed, stream_id)``.

    Draws are consumed in whole blocks (four words, or two uniforms), so
    asking for an odd number of uniforms discards the spare one. The same
    pair and call sequence always reproduce the same values; different
    ``stream_id`` values address disjoint counter ranges.
    """

    def __init__(self, master_seed: int, stream_id: int = 0):
        self.master_seed = _check_int(master_seed, "master_seed", SEED_MAX)
        self.stream_id = _check_int(stream_id, "stream_id", STREAM_MAX)
        self._block = np.uint64(0)

    @property
    def key(self):
        return split_seed(self.master_seed)

    @property
    def position(self) -> int:
        """Number of blocks consumed so far."""
        return int(self._block)

    def spawn(self, stream_id: int) -> "RngStream":
        return RngStream(self.master_seed, stream_id)

    def words(self, size: int) -> np.ndarray:
        """Raw 32-bit words (as uint64)."""
        out = np.empty(int(size), dtype=np.uint64)
        if size:
            stream = np.uint64(self.stream_id)
            self._block = np.uint64(_fill_words(*self.key, stream, self._block, out))
        return out

    def uniform(self, size: int) -> np.ndarray:
        """Uniform doubles strictly inside (0, 1)."""
        out = np.empty(int(size), dtype=np.float64)
        if size:
            stream = np.uint64(self.stream_id)
            self._block = np.uint64(_fill_uniform(*self.key, stream, self._block, out))
        return out

    def normal(self, size: int) -> np.ndarray:
        u = self.uniform(size)
        _ndtri_inplace(u)
        return u

    def exponential(self, size: int, rate: float = 1.0) -> np.ndarray:
        return -np.log(self.uniform(size)) / rate

    def __repr__(self):
        return (f"RngStream(master_seed={self.master_seed}, stream_id={self.stream_id}, "
                f"position={self.position})")
