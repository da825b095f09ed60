"""Ensemble statistics of vortex samples: MLE fits ranked by AIC, histograms, KS distance."""

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import InsufficientDataError

MIN_FIT_SAMPLES = 30
FAMILIES = ("normal", "lognormal", "gamma", "beta", "exponential")


@dataclass(frozen=True)
class FitResult:
    family: str
    params: tuple
    loglik: float
    aic: float
    n: int
    converged: bool = True
    message: str = ""

    @property
    def k(self):
        return len(self.params)


@dataclass(frozen=True)
class Hist1D:
    edges: np.ndarray
    density: np.ndarray


@dataclass(frozen=True)
class Hist2D:
    x_edges: np.ndarray
    y_edges: np.ndarray
    density: np.ndarray

    def integral(self):
        area = np.outer(np.diff(self.x_edges), np.diff(self.y_edges))
        return float(np.sum(self.density * area))


def _result(family, params, loglik, n):
    loglik = float(loglik)
    return FitResult(family, tuple(float(p) for p in params), loglik, 2 * len(params) - 2 * loglik, n)


def _failed(family, nparams, n, message):
    return FitResult(family, (math.nan,) * nparams, -math.inf, math.inf, n, False, message)


def fit_normal(x):
    mu = x.mean()
    sigma = math.sqrt(np.mean((x - mu) ** 2))
    if not sigma > 0:
        return _failed("normal", 2, x.size, "zero variance")
    ll = -0.5 * x.size * (math.log(2 * math.pi * sigma**2) + 1.0)
    return _result("normal", (mu, sigma), ll, x.size)


def fit_lognormal(x):
    if np.any(x <= 0):
        return _failed("lognormal", 2, x.size, "non-positive samples")
    lx = np.log(x)
    mu = lx.mean()
    sigma = math.sqrt(np.mean((lx - mu) ** 2))
    if not sigma > 0:
        return _failed("lognormal", 2, x.size, "zero variance")
    ll = -0.5 * x.size * (math.log(2 * math.pi * sigma**2) + 1.0) - lx.sum()
    return _result("lognormal", (mu, sigma), ll, x.size)


def fit_exponential(x):
    if np.any(x < 0):
        return _failed("exponential", 1, x.size, "negative samples")
    mean = x.mean()
    if not mean > 0:
        return _failed("exponential", 1, x.size, "zero mean")
    rate = 1.0 / mean
    ll = x.size * math.log(rate) - rate * x.sum()
    return _result("exponential", (rate,), ll, x.size)


def fit_gamma(x, tol=1e-10, max_iter=100):
    """Shape/scale MLE: Newton on ``log(a) - digamma(a) = s`` from Minka's starting point."""
    if np.any(x <= 0):
        return _failed("gamma", 2, x.size, "non-positive samples")
    mean = x.mean()
    s = math.log(mean) - np.mean(np.log(x))
    if not s > 0:
        return _failed("gamma", 2, x.size, "degenerate sample")
    a = (3 - s + math.sqrt((s - 3) ** 2 + 24 * s)) / (12 * s)
    for _ in range(max_iter):
        g = math.log(a) - special.digamma(a) - s
        dg = 1.0 / a - special.polygamma(1, a)
        step = g / dg
        a_new = a - step
        if a_new <= 0:
            a_new = a / 2
        if abs(a_new - a) <= tol * a:
            a = a_new
            break
        a = a_new
    else:
        return _failed("gamma", 2, x.size, "Newton iteration did not converge")
    scale = mean / a
    ll = np.sum((a - 1) * np.log(x) - x / scale) - x.size * (special.gammaln(a) + a * math.log(scale))
    return _result("gamma", (a, scale), ll, x.size)


def fit_beta(x, tol=1e-10, max_iter=200):
    """MLE of ``(a, b)`` by Newton's method on the two score equations."""
    if np.any(x <= 0) or np.any(x >= 1):
        return _failed("beta", 2, x.size, "samples outside (0, 1)")
    g1 = np.mean(np.log(x))
    g2 = np.mean(np.log1p(-x))
    m, v = x.mean(), x.var()
    if not v > 0:
        return _failed("beta", 2, x.size, "zero variance")
    common = m * (1 - m) / v - 1
    a, b = max(m * common, 1e-3), max((1 - m) * common, 1e-3)
    for _ in range(max_iter):
        dab = special.digamma(a + b)
        f = np.array([special.digamma(a) - dab - g1, special.digamma(b) - dab - g2])
        tab = special.polygamma(1, a + b)
        jac = np.array([[special.polygamma(1, a) - tab, -tab], [-tab, special.polygamma(1, b) - tab]])
        step = np.linalg.solve(jac, f)
        na, nb = a - step[0], b - step[1]
        while na <= 0 or nb <= 0:
            step /= 2
            na, nb = a - step[0], b - step[1]
        done = abs(na - a) <= tol * a and abs(nb - b) <= tol * b
        a, b = na, nb
        if done:
            break
    else:
        return _failed("beta", 2, x.size, "Newton iteration did not converge")
    ll = x.size * ((a - 1) * g1 + (b - 1) * g2 - special.betaln(a, b))
    return _result("beta", (a, b), ll, x.size)


_FITTERS = {
    "normal": fit_normal,
    "lognormal": fit_lognormal,
    "gamma": fit_gamma,
    "beta": fit_beta,
    "exponential": fit_exponential,
}


def fit_all(samples, families=FAMILIES):
    """Fit every family; converged fits come first, sorted by AIC."""
    x = np.sort(np.asarray(samples, dtype=np.float64).ravel())
    if x.size < MIN_FIT_SAMPLES:
        raise InsufficientDataError(f"need at least {MIN_FIT_SAMPLES} samples, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise ValueError("samples must be finite")
    fits = [_FITTERS[f](x) for f in families]
    ok = sorted((f for f in fits if f.converged), key=lambda f: (f.aic, f.family))
    bad = [f for f in fits if not f.converged]
    return ok + bad


def best_family(samples):
    return fit_all(samples)[0].family


def write_fit_table(fits, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["family", "param1", "param2", "loglik", "aic", "rank"])
        rank = 0
        for f in fits:
            p = list(f.params) + [math.nan] * (2 - len(f.params))
            if f.converged:
                rank += 1
            w.writerow([f.family, repr(p[0]), repr(p[1]), repr(f.loglik), repr(f.aic), rank if f.converged else ""])


# ---------------------------------------------------------------------------
# histograms and two-sample distance


def _edges(x, n_bins, log):
    lo, hi = float(np.min(x)), float(np.max(x))
    if lo == hi:
        pad = 0.5 if lo == 0 else 0.5 * abs(lo)
        return np.linspace(lo - pad, hi + pad, n_bins + 1)
    if log:
        if lo <= 0:
            raise ValueError("log-spaced bins need positive samples")
        return np.geomspace(lo, hi, n_bins + 1)
    return np.linspace(lo, hi, n_bins + 1)


def hist1d(samples, n_bins=50, log=False):
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size == 0:
        raise InsufficientDataError("cannot histogram an empty sample")
    if n_bins < 2:
        raise ValueError("n_bins must be at least 2")
    density, edges = np.histogram(x, bins=_edges(x, n_bins, log), density=True)
    return Hist1D(edges, density)


def hist2d(x, y, n_bins=50, log=False):
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.size == 0 or y.size == 0:
        raise InsufficientDataError("cannot histogram an empty sample")
    if x.size != y.size:
        raise ValueError("x and y must have the same length")
    if n_bins < 2:
        raise ValueError("n_bins must be at least 2")
    density, xe, ye = np.histogram2d(x, y, bins=[_edges(x, n_bins, log), _edges(y, n_bins, log)], density=True)
    return Hist2D(xe, ye, density)


def write_hist_csv(hist, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if isinstance(hist, Hist2D):
            w.writerow(["x_lo", "x_hi", "y_lo", "y_hi", "density"])
            for i in range(hist.density.shape[0]):
                for j in range(hist.density.shape[1]):
                    w.writerow([repr(hist.x_edges[i]), repr(hist.x_edges[i + 1]), repr(hist.y_edges[j]),
                                repr(hist.y_edges[j + 1]), repr(hist.density[i, j])])
        else:
            w.writerow(["lo", "hi", "density"])
            for i, d in enumerate(hist.density):
                w.writerow([repr(hist.edges[i]), repr(hist.edges[i + 1]), repr(d)])


def ks_two_sample(a, b):
    """Largest vertical distance between the empirical CDFs of ``a`` and ``b``."""
    a = np.sort(np.asarray(a, dtype=np.float64).ravel())
    b = np.sort(np.asarray(b, dtype=np.float64).ravel())
    if a.size == 0 or b.size == 0:
        raise InsufficientDataError("both samples must be nonempty")
    grid = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, grid, side="right") / a.size
    cdf_b = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(cdf_a - cdf_b)))


@dataclass
class RunManifest:
    inputs: list
    eps0: float = None
    seeds: list = field(default_factory=list)
    flags: dict = field(default_factory=dict)

    def write(self, path):
        with open(path, "w") as fh:
            json.dump(
                {"inputs": self.inputs, "eps0": self.eps0, "seeds": self.seeds, "flags": self.flags},
                fh, indent=2, sort_keys=True,
            )
