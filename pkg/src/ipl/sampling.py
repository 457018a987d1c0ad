"""Reproducible random variates for the IPL law.

Uniforms come from Philox4x32-10 (Salmon, Moraes, Dror & Shaw, "Parallel
random numbers: as easy as 1, 2, 3", SC11), a counter-based generator
written out here with plain numpy integer arithmetic so that a given
``(seed, stream_id)`` yields the same bits on every platform.

Counter layout of one Philox block (four 32-bit words)::

    [block_index lo, block_index hi, stream_id lo, stream_id hi]

and the 64-bit seed is the key.  Distinct stream ids therefore occupy
disjoint counter ranges.  Each block yields two doubles, each built from
53 bits of a 64-bit word and mapped to the open interval (0, 1).
"""

import numpy as np

from .exceptions import DomainError
from .model import quantile

_MASK32 = np.uint64(0xFFFFFFFF)
_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = 0x9E3779B9
_W1 = 0xBB67AE85
_ROUNDS = 10
_U64_MAX = 2**64 - 1


def philox4x32(counter, key, rounds=_ROUNDS):
    """Philox4x32 bijection on an array of counters.

    Parameters
    ----------
    counter : array of shape (m, 4)
        32-bit counter words (any unsigned/int dtype holding values < 2**32).
    key : tuple of two ints
        32-bit key words.

    Returns
    -------
    ndarray of shape (m, 4), dtype uint64, values < 2**32.
    """
    ctr = np.asarray(counter, dtype=np.uint64).reshape(-1, 4)
    c0, c1, c2, c3 = (ctr[:, i].copy() for i in range(4))
    k0, k1 = int(key[0]) & 0xFFFFFFFF, int(key[1]) & 0xFFFFFFFF
    for r in range(rounds):
        if r:
            k0 = (k0 + _W0) & 0xFFFFFFFF
            k1 = (k1 + _W1) & 0xFFFFFFFF
        p0 = _M0 * c0
        p1 = _M1 * c2
        c0, c1, c2, c3 = (
            (p1 >> np.uint64(32)) ^ c1 ^ np.uint64(k0),
            p1 & _MASK32,
            (p0 >> np.uint64(32)) ^ c3 ^ np.uint64(k1),
            p0 & _MASK32,
        )
    return np.stack([c0, c1, c2, c3], axis=1)


class RngStream:
    """A seeded substream of uniform variates.

    Instances carry a read position and are meant for a single owner; give
    concurrent workers distinct ``stream_id`` values instead of sharing one.
    """

    def __init__(self, seed, stream_id=0):
        for name, value in (("seed", seed), ("stream_id", stream_id)):
            if not (isinstance(value, (int, np.integer)) and 0 <= int(value) <= _U64_MAX):
                raise DomainError(f"{name} must be an unsigned 64-bit integer, got {value!r}")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self.position = 0  # doubles consumed so far

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id}, position={self.position})"

    def _blocks(self, start, count):
        idx = np.arange(start, start + count, dtype=np.uint64)
        ctr = np.empty((count, 4), dtype=np.uint64)
        ctr[:, 0] = idx & _MASK32
        ctr[:, 1] = idx >> np.uint64(32)
        ctr[:, 2] = self.stream_id & 0xFFFFFFFF
        ctr[:, 3] = self.stream_id >> 32
        return philox4x32(ctr, (self.seed & 0xFFFFFFFF, self.seed >> 32))

    def uniform(self, n):
        """Next ``n`` doubles, each strictly inside (0, 1)."""
        n = int(n)
        if n < 0:
            raise DomainError("n must be nonnegative")
        first = self.position // 2
        last = (self.position + n + 1) // 2
        words = self._blocks(first, last - first)
        hi = np.concatenate([words[:, [0]], words[:, [2]]], axis=1).ravel()
        lo = np.concatenate([words[:, [1]], words[:, [3]]], axis=1).ravel()
        bits = ((hi << np.uint64(32)) | lo) >> np.uint64(11)
        u = (bits.astype(float) + 0.5) * 2.0**-53
        offset = self.position - 2 * first
        self.position += n
        return u[offset:offset + n]


def _check_n(n):
    if int(n) != n or n < 1:
        raise DomainError(f"sample size must be a positive integer, got {n!r}")
    return int(n)


def sample_inverse_transform(p, rng, n):
    """Draw ``n`` IPL variates as ``quantile(p, U)``."""
    n = _check_n(n)
    return quantile(p, rng.uniform(n))


def lindley_mixture_weight(theta):
    """Probability of the exponential component in Lindley(theta)."""
    return theta / (1.0 + theta)


def lindley_to_ipl(t, alpha):
    """Map Lindley variates ``t`` to IPL variates ``t**(-1/alpha)``."""
    return np.exp(-np.log(t) / alpha)


def sample_lindley_mixture(p, rng, n):
    """Draw ``n`` IPL variates through the Lindley mixture representation.

    Each variate consumes three uniforms: one picks the component
    (Exponential(theta) or Gamma(2, theta)), two give exponentials whose
    sum is the Gamma(2, theta) draw.
    """
    n = _check_n(n)
    u = rng.uniform(3 * n).reshape(n, 3)
    exp1 = -np.log(u[:, 1]) / p.theta
    exp2 = -np.log(u[:, 2]) / p.theta
    use_exp = u[:, 0] < lindley_mixture_weight(p.theta)
    t = np.where(use_exp, exp1, exp1 + exp2)
    return lindley_to_ipl(t, p.alpha)


SAMPLERS = {
    "inverse_transform": sample_inverse_transform,
    "lindley_mixture": sample_lindley_mixture,
}


def get_sampler(name):
    aliases = {"inv": "inverse_transform", "mix": "lindley_mixture"}
    try:
        return SAMPLERS[aliases.get(name, name)]
    except KeyError:
        raise DomainError(f"unknown sampler {name!r}; choose from {sorted(SAMPLERS)}") from None

