"""Real Lambert W branches and the log-gamma function.

Both Lambert W branches accept scalars or array-likes and return the same
shape (a Python float for scalar input).
"""

import math

import numpy as np

from .exceptions import DomainError

#: Left endpoint of the real domain of both Lambert W branches.
BRANCH_POINT = -math.exp(-1.0)

# arguments this far below the branch point are treated as rounding noise
_CLAMP_SLACK = 1e-12
_MAX_HALLEY = 60
_EPS = np.finfo(float).eps


def _prepare(x):
    shape = np.shape(x)
    arr = np.asarray(x, dtype=float).ravel()
    if np.isnan(arr).any():
        raise DomainError("Lambert W argument is NaN")
    if (arr < BRANCH_POINT - _CLAMP_SLACK).any():
        raise DomainError(f"Lambert W argument below -1/e: {arr.min()!r}")
    return np.maximum(arr, BRANCH_POINT), shape


def _halley(w, x, active):
    """Refine ``w`` so that ``w * exp(w) = x`` on the ``active`` mask."""
    w = w.copy()
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for _ in range(_MAX_HALLEY):
            if not active.any():
                break
            wa, xa = w[active], x[active]
            ew = np.exp(wa)
            f = wa * ew - xa
            wp1 = wa + 1.0
            denom = ew * wp1 - (wa + 2.0) * f / (2.0 * wp1)
            dw = np.where((denom != 0.0) & np.isfinite(denom), f / denom, 0.0)
            w[active] = wa - dw
            done = np.abs(dw) <= 4.0 * _EPS * (1.0 + np.abs(wa))
            idx = np.flatnonzero(active)
            active[idx[done]] = False
    return w


def _branch_series(x, sign):
    # expansion in p = sqrt(2(e*x + 1)) around the branch point
    p = np.sqrt(np.maximum(2.0 * (math.e * x + 1.0), 0.0))
    sp = sign * p
    return -1.0 + sp - p * p / 3.0 + (11.0 / 72.0) * sp * p * p


def lambert_w0(x):
    """Principal branch W0 of the Lambert W function on [-1/e, inf).

    Returns ``w >= -1`` with ``w * exp(w) == x`` to working precision.
    Arguments less than 1e-12 below -1/e are clamped to the branch point.
    """
    x, shape = _prepare(x)
    if np.isinf(x).any():
        raise DomainError("Lambert W argument is infinite")
    w = np.empty_like(x)
    near = x < -0.25
    w[near] = _branch_series(x[near], 1.0)
    far = ~near
    # Winitzki's approximation, within a few percent everywhere on x >= -0.25
    lx = np.log1p(x[far])
    w[far] = lx * (1.0 - np.log1p(lx) / (2.0 + lx))
    active = (x != BRANCH_POINT) & (x != 0.0)
    w[x == 0.0] = 0.0
    w[x == BRANCH_POINT] = -1.0
    w = _halley(w, x, active)
    return float(w[0]) if shape == () else w.reshape(shape)


def lambert_wm1(x):
    """Lower branch W-1 of the Lambert W function on [-1/e, 0).

    Returns ``w <= -1``. Same clamping rule as :func:`lambert_w0`.
    """
    x, shape = _prepare(x)
    if (x >= 0.0).any():
        raise DomainError("W-1 is defined only for x < 0")
    w = np.empty_like(x)
    near = x < -0.25
    w[near] = _branch_series(x[near], -1.0)
    far = ~near
    l1 = np.log(-x[far])
    l2 = np.log(-l1)
    w[far] = l1 - l2 + l2 / l1
    active = x != BRANCH_POINT
    w[~active] = -1.0
    w = _halley(w, x, active)
    # Halley may land a hair above -1 right at the branch point
    w = np.minimum(w, -1.0)
    return float(w[0]) if shape == () else w.reshape(shape)


_EULER_GAMMA = 0.5772156649015329
# zeta(k) - 1 for k = 2..30
_ZETA_M1 = (
    0.6449340668482264, 0.2020569031595943, 0.08232323371113819,
    0.03692775514336993, 0.01734306198444914, 0.008349277381922827,
    0.00407735619794434, 0.0020083928260822143, 0.0009945751278180853,
    0.0004941886041194645, 0.0002460865533080483, 0.00012271334757848915,
    6.124813505870483e-05, 3.058823630702049e-05, 1.528225940865187e-05,
    7.637197637899763e-06, 3.81729326499984e-06, 1.908212716553939e-06,
    9.539620338727962e-07, 4.769329867878064e-07, 2.38450502727733e-07,
    1.1921992596531106e-07, 5.960818905125948e-08, 2.980350351465228e-08,
    1.4901554828365043e-08, 7.45071178983543e-09, 3.725334024788457e-09,
    1.862659723513049e-09, 9.313274324196682e-10,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
# Stirling correction coefficients B_2k / (2k (2k - 1))
_STIRLING = (
    1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0, 1.0 / 1188.0,
    -691.0 / 360360.0, 1.0 / 156.0,
)


def _zeta_tail(eps):
    # sum_{k>=2} (-1)^k (zeta(k) - 1) eps^k / k
    total = 0.0
    term = -eps
    for k, z in enumerate(_ZETA_M1, start=2):
        term *= -eps
        total += z * term / k
    return total


def _stirling(x):
    inv = 1.0 / x
    inv2 = inv * inv
    corr = 0.0
    power = inv
    for c in _STIRLING:
        corr += c * power
        power *= inv2
    return (x - 0.5) * math.log(x) - x + _HALF_LOG_2PI + corr


def ln_gamma(x):
    """Natural log of the gamma function for real ``x > 0``.

    Taylor expansion about 1 and 2 (where ln Gamma vanishes, so relative
    accuracy needs care), Stirling's series with upward recurrence elsewhere.
    """
    x = float(x)
    if not x > 0.0 or math.isinf(x):
        raise DomainError(f"ln_gamma requires finite x > 0, got {x!r}")
    if x < 0.5:
        return ln_gamma(x + 1.0) - math.log(x)
    if x <= 1.5:
        eps = x - 1.0
        return eps * (1.0 - _EULER_GAMMA) - math.log1p(eps) + _zeta_tail(eps)
    if x <= 2.5:
        eps = x - 2.0
        return eps * (1.0 - _EULER_GAMMA) + _zeta_tail(eps)
    if x >= 10.0:
        return _stirling(x)
    shift = 0.0
    while x < 10.0:
        shift += math.log(x)
        x += 1.0
    return _stirling(x) - shift
