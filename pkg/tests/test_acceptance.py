"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Every check runs its workload under a wall-clock budget and compares against
an independent oracle from ``oracles.py`` (quadrature, bisection, finite
differences, closed forms coded separately from the package).
"""

import hashlib
import math
import os
import subprocess
import sys
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

from ipl.estimation import (
    chi2_1_sf,
    fit_inverse_lindley,
    fit_mle,
    loglik,
    lr_test_alpha1,
    observed_info,
    score,
)
from ipl.mc_study import StudyConfig, run_study
from ipl.model import IplParams, cdf, pdf, quantile, raw_moment
from ipl.sampling import RngStream, sample_inverse_transform, sample_lindley_mixture
from ipl.special import BRANCH_POINT, lambert_w0, lambert_wm1, ln_gamma

from oracles import (
    KS_C_01,
    central_gradient,
    central_jacobian,
    inverse_lindley_cdf,
    inverse_lindley_pdf,
    ipl_integral,
    ks_one_sample,
    ks_two_sample,
    pdf_mass,
)

GRID16 = [IplParams(t, a) for t in (0.5, 1.0, 2.0, 5.0) for a in (0.5, 1.0, 2.0, 5.0)]
SCENARIOS = [IplParams(1.0, 2.0), IplParams(0.5, 1.0), IplParams(2.0, 3.0)]
SRC = Path(__file__).resolve().parents[1] / "src"


class Check:
    """Collects named sub-results and the elapsed time for one criterion."""

    def __init__(self, label, budget):
        self.label = label
        self.budget = budget
        self.parts = []
        self.elapsed = 0.0

    def add(self, name, ok, detail):
        self.parts.append((name, bool(ok), detail))

    @property
    def ok(self):
        return all(p[1] for p in self.parts) and self.elapsed < self.budget

    def line(self):
        status = "PASS" if self.ok else "FAIL"
        details = "; ".join(f"{n}={d}" + ("" if ok else " (!)") for n, ok, d in self.parts)
        return f"[{status}] {self.label}: {details}; time={self.elapsed:.2f}s (limit {self.budget:g}s)"


@contextmanager
def criterion(capsys, label, budget):
    chk = Check(label, budget)
    t0 = time.perf_counter()
    try:
        yield chk
    except Exception as exc:
        chk.add("error", False, type(exc).__name__)
        raise
    finally:
        chk.elapsed = time.perf_counter() - t0
        with capsys.disabled():
            print("\n" + chk.line())
    assert chk.ok, chk.line()


def test_ac01_normalization(capsys):
    with criterion(capsys, "AC1 normalization", 5.0) as chk:
        err = max(abs(pdf_mass(lambda y, p=p: pdf(p, y), p.alpha) - 1.0) for p in GRID16)
        chk.add("max|mass-1|", err <= 1e-8, f"{err:.2e}<=1e-8")


def test_ac02_quantile_roundtrip(capsys):
    u = np.concatenate([[1e-6], np.linspace(0.01, 0.99, 99), [1.0 - 1e-6]])
    with criterion(capsys, "AC2 cdf/quantile roundtrip", 1.0) as chk:
        err = max(float(np.max(np.abs(cdf(p, quantile(p, u)) - u))) for p in GRID16)
        chk.add("max|F(Q(u))-u|", err <= 1e-10, f"{err:.2e}<=1e-10")


def _derivative_cases(count=20, seed=31415):
    rng = np.random.default_rng(seed)
    cases = []
    for i in range(count):
        truth = IplParams(rng.uniform(0.3, 4.0), rng.uniform(0.5, 5.0))
        y = sample_inverse_transform(truth, RngStream(seed, i), int(rng.integers(5, 80)))
        at = IplParams(truth.theta * rng.uniform(0.7, 1.3), truth.alpha * rng.uniform(0.7, 1.3))
        cases.append((at, y))
    return cases


def test_ac03_derivative_oracles(capsys):
    cases = _derivative_cases()
    with criterion(capsys, "AC3 derivative oracles", 5.0) as chk:
        g_err = h_err = 0.0
        for p, y in cases:
            ll = lambda x, y=y: loglik(IplParams(x[0], x[1]), y)
            x0 = np.array([p.theta, p.alpha])
            fd_g = central_gradient(ll, x0)
            g_err = max(g_err, np.max(np.abs(np.array(score(p, y)) - fd_g)) / np.max(np.abs(fd_g)))
            # Hessian from second differences of the log-likelihood itself
            fd_h = central_jacobian(lambda x: central_gradient(ll, x, rel_step=1e-4), x0, rel_step=1e-4)
            info = observed_info(p, y)
            h_err = max(h_err, np.max(np.abs(info + fd_h)) / np.max(np.abs(fd_h)))
        chk.add("score rel err", g_err <= 1e-6, f"{g_err:.2e}<=1e-6")
        chk.add("info rel err", h_err <= 1e-5, f"{h_err:.2e}<=1e-5")


def test_ac04_moments(capsys):
    with criterion(capsys, "AC4 moment oracle", 5.0) as chk:
        err = 0.0
        for theta in (0.5, 1.0, 2.0):
            for alpha in (2.0, 3.0, 5.0):
                for r in (0.5, 1.0, 1.9):
                    exact = raw_moment(IplParams(theta, alpha), r)
                    err = max(err, abs(exact / ipl_integral(theta, alpha, r) - 1.0))
        chk.add("max rel err", err <= 1e-8, f"{err:.2e}<=1e-8")


def test_ac05_samplers(capsys):
    n = 100_000
    crit1 = KS_C_01 / math.sqrt(n)
    crit2 = KS_C_01 * math.sqrt(2.0 / n)
    with criterion(capsys, "AC5 sampler correctness", 30.0) as chk:
        worst = {"inverse_transform": 0.0, "lindley_mixture": 0.0}
        worst2 = 0.0
        for s, p in enumerate(SCENARIOS):
            for seed in range(1, 6):
                a = sample_inverse_transform(p, RngStream(seed, 2 * s), n)
                b = sample_lindley_mixture(p, RngStream(seed, 2 * s + 1), n)
                f = lambda v, p=p: cdf(p, v)
                worst["inverse_transform"] = max(worst["inverse_transform"], ks_one_sample(a, f))
                worst["lindley_mixture"] = max(worst["lindley_mixture"], ks_one_sample(b, f))
                worst2 = max(worst2, ks_two_sample(a, b))
        for name, d in worst.items():
            chk.add(f"KS {name}", d < crit1, f"{d:.5f}<{crit1:.5f}")
        chk.add("KS two-sample", worst2 < crit2, f"{worst2:.5f}<{crit2:.5f}")


def test_ac06_alpha1_reduction(capsys):
    y = np.geomspace(1e-2, 1e3, 400)
    with criterion(capsys, "AC6 alpha=1 reduction", 1.0) as chk:
        pdf_err = cdf_err = 0.0
        for theta in (0.1, 0.5, 1.0, 2.0, 5.0):
            p = IplParams(theta, 1.0)
            ref_pdf = inverse_lindley_pdf(theta, y)
            mask = ref_pdf > 0
            pdf_err = max(pdf_err, np.max(np.abs(pdf(p, y)[mask] / ref_pdf[mask] - 1.0)))
            cdf_err = max(cdf_err, np.max(np.abs(cdf(p, y) - inverse_lindley_cdf(theta, y))))
        chk.add("pdf rel err", pdf_err <= 1e-12, f"{pdf_err:.2e}<=1e-12")
        chk.add("cdf abs err", cdf_err <= 1e-12, f"{cdf_err:.2e}<=1e-12")


@pytest.mark.slow
def test_ac07_consistency(capsys):
    cfg = StudyConfig(scenarios=[(1, 2), (0.5, 1), (2, 3)], sample_sizes=[50, 200, 800], replicates=500, seed=1)
    with criterion(capsys, "AC7 estimator consistency", 600.0) as chk:
        table = run_study(cfg)
        for scen in cfg.scenarios:
            rows = [table.row(scen, n) for n in cfg.sample_sizes]
            tag = f"({scen.theta:g},{scen.alpha:g})"
            for par in ("theta", "alpha"):
                mse = [getattr(r, f"mse_{par}") for r in rows]
                bias = [abs(getattr(r, f"bias_{par}")) for r in rows]
                chk.add(f"{tag} mse_{par}", mse[0] > mse[1] > mse[2], "/".join(f"{m:.4g}" for m in mse))
                chk.add(f"{tag} |bias_{par}|", bias[2] < bias[0], f"{bias[0]:.3g}->{bias[2]:.3g}")
            chk.add(f"{tag} failures", sum(r.failures for r in rows) == 0, str(sum(r.failures for r in rows)))
        again = run_study(cfg).to_csv()
        chk.add("deterministic", again == table.to_csv(), hashlib.sha256(again.encode()).hexdigest()[:12])


def test_ac08_nesting_and_lr(capsys):
    rng = np.random.default_rng(8)
    with criterion(capsys, "AC8 nesting and LR", 30.0) as chk:
        min_gap = math.inf
        min_stat = math.inf
        for i in range(50):
            truth = IplParams(rng.uniform(0.3, 4.0), rng.uniform(0.5, 4.0))
            y = sample_inverse_transform(truth, RngStream(8, i), int(rng.integers(10, 300)))
            full, nested = fit_mle(y), fit_inverse_lindley(y)
            min_gap = min(min_gap, full.loglik - nested.loglik)
            min_stat = min(min_stat, lr_test_alpha1(y, full=full, nested=nested)[0])
        p = chi2_1_sf(3.841)
        chk.add("min(l_IPL-l_IL)", min_gap >= 0.0, f"{min_gap:.3g}>=0")
        chk.add("min LR stat", min_stat >= 0.0, f"{min_stat:.3g}>=0")
        chk.add("p(3.841)", abs(p - 0.05) <= 5e-4, f"{p:.6f}")


def _simulate(out, workers):
    argv = [sys.executable, "-m", "ipl", "simulate"]
    for p in SCENARIOS:
        argv += ["--theta", repr(p.theta), "--alpha", repr(p.alpha)]
    argv += ["--sizes", "50,100,200", "--reps", "40", "--seed", "1", "--workers", str(workers), "--output", str(out)]
    env = dict(os.environ, PYTHONPATH=str(SRC) + os.pathsep + os.environ.get("PYTHONPATH", ""))
    proc = subprocess.run(argv, capture_output=True, text=True, env=env, timeout=120)
    assert proc.returncode == 0, proc.stderr
    return out.read_bytes()


def test_ac09_determinism(capsys, tmp_path):
    with criterion(capsys, "AC9 simulate determinism", 120.0) as chk:
        a = _simulate(tmp_path / "a.csv", 1)
        b = _simulate(tmp_path / "b.csv", 1)
        c = _simulate(tmp_path / "c.csv", 2)
        digest = hashlib.sha256(a).hexdigest()[:12]
        chk.add("rows", a.count(b"\n") == 10, str(a.count(b"\n")))
        chk.add("run1==run2", a == b, digest)
        chk.add("serial==parallel", a == c, hashlib.sha256(c).hexdigest()[:12])


def test_ac10_special_functions(capsys):
    with criterion(capsys, "AC10 special functions", 1.0) as chk:
        x0 = BRANCH_POINT + np.geomspace(1e-9, 10.0 - BRANCH_POINT, 2000)
        w0 = lambert_w0(x0)
        e0 = np.max(np.abs(w0 * np.exp(w0) - x0) / np.abs(x0))
        xm = -np.geomspace(1e-12, -BRANCH_POINT * (1.0 - 1e-12), 2000)
        wm = lambert_wm1(xm)
        em = np.max(np.abs(wm * np.exp(wm) - xm) / np.abs(xm))
        chk.add("W0 rel round-trip", e0 <= 1e-13, f"{e0:.2e}<=1e-13")
        chk.add("W-1 rel round-trip", em <= 1e-13, f"{em:.2e}<=1e-13")
        chk.add("W-1<=-1<=W0", np.all(wm <= -1.0) and np.all(lambert_w0(xm) >= -1.0), "ok")

        # ln_gamma is a scalar routine
        rec = max(abs(ln_gamma(x + 1.0) - ln_gamma(x) - math.log(x)) for x in np.linspace(0.1, 50.0, 2000))
        refl = max(
            abs(ln_gamma(x) + ln_gamma(1.0 - x) - math.log(math.pi / math.sin(math.pi * x)))
            for x in np.linspace(0.001, 0.999, 999)
        )
        chk.add("ln_gamma recurrence", rec <= 1e-10, f"{rec:.2e}<=1e-10")
        chk.add("ln_gamma reflection", refl <= 1e-10, f"{refl:.2e}<=1e-10")
