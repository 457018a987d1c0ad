"""Inverse power Lindley (IPL) lifetime distribution.

Evaluation, sampling, maximum-likelihood fitting, Monte Carlo bias/MSE
studies and goodness-of-fit comparison against the inverse Lindley submodel.
"""

from .estimation import (
    FitOptions,
    FitResult,
    fit_inverse_lindley,
    fit_mle,
    loglik,
    lr_test_alpha1,
    observed_info,
    profile_theta,
    score,
)
from .exceptions import (
    ConfigError,
    DegenerateSampleError,
    DomainError,
    IplError,
    MomentDivergenceError,
)
from .gof import GofReport, compare_models, information_criteria, ks_pvalue, ks_statistic
from .mc_study import StudyConfig, StudyTable, replicate_stream, run_study
from .model import (
    IplParams,
    cdf,
    hazard,
    log_pdf,
    mean,
    mode,
    pdf,
    quantile,
    raw_moment,
    survival,
    variance,
)
from .sampling import RngStream, sample_inverse_transform, sample_lindley_mixture
from .special import lambert_w0, lambert_wm1, ln_gamma

__version__ = "0.1.0"
