"""Goodness of fit and model comparison for fitted IPL / inverse Lindley models."""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .estimation import as_sample, fit_inverse_lindley, fit_mle
from .exceptions import DomainError, IplError
from .model import cdf

#: Below this sample size the asymptotic KS p-value is only indicative.
KS_ASYMPTOTIC_MIN_N = 35
_SERIES_TOL = 1e-12


class SmallSampleWarning(UserWarning):
    pass


def ks_statistic(sample, cdf_fn):
    """One-sample Kolmogorov-Smirnov distance between ``sample`` and ``cdf_fn``.

    ``cdf_fn`` must accept an array and return CDF values in [0, 1].  Ties
    are handled by the plain sorted-order formula.
    """
    y = np.sort(as_sample(sample))
    n = y.size
    f = np.asarray(cdf_fn(y), dtype=float)
    i = np.arange(1, n + 1)
    d = max(float(np.max(i / n - f)), float(np.max(f - (i - 1) / n)))
    return min(max(d, 0.0), 1.0)


def ks_pvalue(d, n):
    """Asymptotic p-value of the KS statistic ``d`` for sample size ``n``.

    Uses the Kolmogorov limiting distribution of ``sqrt(n) * d``.  The
    alternating series is used for ``lambda >= 1`` and the Jacobi
    theta-function form below, where the alternating series converges slowly.
    For very large ``lambda`` the result may underflow to 0.
    """
    if not 0.0 <= d <= 1.0:
        raise DomainError(f"KS distance must lie in [0, 1], got {d!r}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n!r}")
    lam = math.sqrt(n) * d
    if lam < 1e-3:
        return 1.0
    if lam < 1.0:
        c = math.pi**2 / (8.0 * lam * lam)
        total = 0.0
        for j in range(1, 100):
            term = math.exp(-((2 * j - 1) ** 2) * c)
            total += term
            if term < _SERIES_TOL * total:
                break
        return min(1.0, max(0.0, 1.0 - math.sqrt(2.0 * math.pi) / lam * total))
    total = 0.0
    for j in range(1, 100):
        term = math.exp(-2.0 * j * j * lam * lam)
        total += term if j % 2 else -term
        if term < _SERIES_TOL * abs(total):
            break
    return min(1.0, max(0.0, 2.0 * total))


def information_criteria(loglik, k, n):
    """Return ``(aic, bic)``; lower is better for both."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return 2.0 * k - 2.0 * loglik, k * math.log(n) - 2.0 * loglik


@dataclass(frozen=True)
class GofReport:
    model_name: str
    k: int
    n: int
    loglik: float
    aic: float
    bic: float
    ks_stat: float
    ks_pvalue: float
    fit: object = None
    error: str | None = None

    @property
    def failed(self):
        return self.error is not None

    @property
    def neg2_loglik(self):
        return -2.0 * self.loglik


def gof_report(fit, sample):
    """Statistics for an already fitted model on ``sample``."""
    y = as_sample(sample)
    aic, bic = information_criteria(fit.loglik, fit.k, y.size)
    d = ks_statistic(y, lambda v: cdf(fit.params, v))
    return GofReport(
        model_name=fit.model,
        k=fit.k,
        n=y.size,
        loglik=fit.loglik,
        aic=aic,
        bic=bic,
        ks_stat=d,
        ks_pvalue=ks_pvalue(d, y.size),
        fit=fit,
    )


def _failed_report(name, k, n, exc):
    nan = math.nan
    return GofReport(name, k, n, nan, nan, nan, nan, nan, fit=None, error=str(exc))


def ranking_key(report):
    """Sort key: AIC ascending, ties to fewer parameters, failures last."""
    return (report.failed, report.aic if not report.failed else math.inf, report.k, report.model_name)


def compare_models(sample):
    """Fit IPL and inverse Lindley to ``sample`` and rank them by AIC.

    A model whose fit fails appears in the list with ``error`` set.
    """
    y = as_sample(sample, min_size=2)
    if y.size < KS_ASYMPTOTIC_MIN_N:
        warnings.warn(
            f"n = {y.size} < {KS_ASYMPTOTIC_MIN_N}: asymptotic KS p-values are approximate",
            SmallSampleWarning,
            stacklevel=2,
        )
    reports = []
    for name, k, fitter in (("IPL", 2, fit_mle), ("InverseLindley", 1, fit_inverse_lindley)):
        try:
            fit = fitter(y)
        except IplError as exc:
            reports.append(_failed_report(name, k, y.size, exc))
            continue
        rep = gof_report(fit, y)
        if not fit.converged:
            rep = GofReport(**{**rep.__dict__, "error": f"fit did not converge: {fit.message}"})
        reports.append(rep)
    return sorted(reports, key=ranking_key)
