"""Closed-form evaluations of the inverse power Lindley (IPL) distribution.

If ``T`` follows a Lindley law with rate ``theta`` then ``Y = T**(-1/alpha)``
is IPL(theta, alpha), with density

    f(y) = alpha theta^2 / (1 + theta) (1 + y^alpha) y^-(2 alpha + 1) exp(-theta y^-alpha)

and CDF ``F(y) = (1 + theta / ((1 + theta) y^alpha)) exp(-theta y^-alpha)``.
``alpha = 1`` gives the inverse Lindley distribution.

Every function taking ``y`` (or ``u``) accepts a scalar or an array-like and
returns a float or an ndarray of the same shape.  Internally all quantities
go through ``log(y)`` so that large ``alpha`` cannot overflow ``y**alpha``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, MomentDivergenceError
from .special import lambert_wm1, ln_gamma

#: CDF values below this are reported as exactly 0.
CDF_UNDERFLOW = 1e-300

# survival uses its power series below this value of z = theta * y**-alpha
_SERIES_CUTOFF = 1.0
_SERIES_TERMS = 40


@dataclass(frozen=True)
class IplParams:
    """Parameter pair of the IPL law.

    Attributes
    ----------
    theta : float
        Lindley rate parameter, ``theta > 0``.
    alpha : float
        Power (shape) parameter, ``alpha > 0``.
    """

    theta: float
    alpha: float

    def __post_init__(self):
        for name in ("theta", "alpha"):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise DomainError(f"{name} must be a real number, got {value!r}") from None
            if not (math.isfinite(value) and value > 0.0):
                raise DomainError(f"{name} must be finite and > 0, got {value!r}")
            object.__setattr__(self, name, value)

    @property
    def is_inverse_lindley(self):
        return self.alpha == 1.0


def _support(y):
    arr = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise DomainError("IPL support is 0 < y < inf; got nonpositive or non-finite values")
    return arr


def _out(values, like):
    return float(values) if np.ndim(like) == 0 else values


def _log_z(p, log_y):
    # log of z = theta * y**-alpha
    return math.log(p.theta) - p.alpha * log_y


def log_pdf(p, y):
    """Log-density, evaluated entirely in log space."""
    arr = _support(y)
    log_y = np.log(arr)
    with np.errstate(over="ignore"):
        z = np.exp(_log_z(p, log_y))
    out = (
        math.log(p.alpha)
        + 2.0 * math.log(p.theta)
        - math.log1p(p.theta)
        + np.logaddexp(0.0, p.alpha * log_y)
        - (2.0 * p.alpha + 1.0) * log_y
        - z
    )
    return _out(out, y)


def pdf(p, y):
    """Probability density function."""
    return _out(np.exp(log_pdf(p, y)), y)


def _log_cdf(p, log_y):
    with np.errstate(over="ignore"):
        z = np.exp(_log_z(p, log_y))
        return -z + np.log1p(z / (1.0 + p.theta))


def cdf(p, y):
    """Cumulative distribution function.

    Values below ``CDF_UNDERFLOW`` are returned as 0.0.
    """
    arr = _support(y)
    out = np.exp(_log_cdf(p, np.log(arr)))
    out = np.where(out < CDF_UNDERFLOW, 0.0, out)
    return _out(out, y)


def _log_survival(p, log_y):
    log_z = _log_z(p, log_y)
    with np.errstate(over="ignore"):
        z = np.exp(log_z)
    out = np.empty(np.shape(z))
    small = z < _SERIES_CUTOFF
    if np.any(~small):
        # far left tail: F is well below 1 so the plain complement is exact enough
        out[~small] = np.log(-np.expm1(_log_cdf(p, log_y[~small])))
    if np.any(small):
        # S = sum_{k>=1} (-1)^(k+1) z^k (1 - c k) / k!, c = 1/(1+theta);
        # factor out z so the log never sees an underflowed product
        zs = z[small]
        c = 1.0 / (1.0 + p.theta)
        total = np.zeros_like(zs)
        term = np.ones_like(zs)
        for k in range(1, _SERIES_TERMS + 1):
            term = term / k  # (-z)^(k-1) / k!
            total += term * (1.0 - c * k)
            term = term * -zs
        out[small] = log_z[small] + np.log(total)
    return out


def survival(p, y):
    """Survival function ``1 - F(y)``, accurate in the right tail."""
    arr = _support(y)
    return _out(np.exp(_log_survival(p, np.log(arr))), y)


def hazard(p, y, with_status=False):
    """Hazard rate ``f(y) / (1 - F(y))``.

    If the survival function underflows to zero the hazard is reported as
    ``inf``.  With ``with_status=True`` a boolean underflow mask (or flag, for
    scalar input) is returned alongside the values.
    """
    arr = _support(y)
    log_y = np.log(arr)
    log_s = _log_survival(p, log_y)
    underflow = np.isneginf(log_s)
    with np.errstate(over="ignore", invalid="ignore"):
        h = np.exp(np.asarray(log_pdf(p, arr)) - log_s)
    h = np.where(underflow, np.inf, h)
    if with_status:
        return _out(h, y), (bool(underflow) if np.ndim(y) == 0 else underflow)
    return _out(h, y)


def quantile(p, u):
    """Inverse CDF via the lower Lambert W branch, with one Newton polish."""
    arr = np.asarray(u, dtype=float)
    if not np.all((arr > 0.0) & (arr < 1.0)):
        raise DomainError("quantile requires 0 < u < 1")
    a = 1.0 + p.theta
    c = 1.0 / a
    w = lambert_wm1(-arr * a * math.exp(-a))
    z = np.maximum(-a - w, np.finfo(float).tiny)
    with np.errstate(under="ignore", divide="ignore", invalid="ignore"):
        g = np.exp(-z + np.log1p(c * z)) - arr
        dg = -c * np.exp(-z) * (p.theta + z)
        step = g / dg
    z_new = z - step
    ok = np.isfinite(z_new) & (z_new > 0.0)
    z = np.where(ok, z_new, z)
    y = np.exp((math.log(p.theta) - np.log(z)) / p.alpha)
    return _out(y, u)


def mode(p):
    """Location of the density maximum.

    ``t = y**alpha`` at the mode is the positive root of
    ``(alpha + 1) t^2 - (alpha theta - 2 alpha - 1) t - alpha theta = 0``.
    """
    a2 = p.alpha + 1.0
    b = p.alpha * p.theta - 2.0 * p.alpha - 1.0
    c = p.alpha * p.theta
    disc = math.sqrt(b * b + 4.0 * a2 * c)
    # pick the cancellation-free form of the positive root
    t = (b + disc) / (2.0 * a2) if b >= 0.0 else 2.0 * c / (disc - b)
    return t ** (1.0 / p.alpha)


def raw_moment(p, r):
    """``E[Y**r]``, finite only for ``0 < r < alpha``.

    Raises
    ------
    MomentDivergenceError
        If ``r >= alpha``.
    """
    r = float(r)
    if not (math.isfinite(r) and r > 0.0):
        raise DomainError(f"moment order must be finite and > 0, got {r!r}")
    if r >= p.alpha:
        raise MomentDivergenceError(
            f"E[Y^{r:g}] diverges: moments exist only for r < alpha = {p.alpha:g}"
        )
    k = r / p.alpha
    log_t = math.log(p.theta)
    log_bracket = np.logaddexp(ln_gamma(2.0 - k), log_t + ln_gamma(1.0 - k))
    return math.exp(k * log_t + float(log_bracket) - math.log1p(p.theta))


def mean(p):
    return raw_moment(p, 1.0)


def variance(p):
    if p.alpha <= 2.0:
        raise MomentDivergenceError(f"variance requires alpha > 2, got {p.alpha:g}")
    m1 = raw_moment(p, 1.0)
    return raw_moment(p, 2.0) - m1 * m1
