import csv
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tfda import stats
from tfda.errors import InsufficientDataError


def test_aic_definition():
    x = np.random.default_rng(0).normal(2, 3, 500)
    for f in stats.fit_all(x):
        if f.converged:
            assert f.aic == pytest.approx(2 * len(f.params) - 2 * f.loglik)


def test_normal_mle():
    x = np.random.default_rng(1).normal(2, 3, 4000)
    fit = stats.fit_normal(np.sort(x))
    assert fit.params == pytest.approx((x.mean(), x.std()))


def test_gamma_mle_recovers_shape():
    x = np.random.default_rng(2).gamma(2.0, 1.5, 20000)
    fit = stats.fit_gamma(x)
    assert fit.converged
    assert fit.params[0] == pytest.approx(2.0, rel=0.05)
    assert fit.params[1] == pytest.approx(1.5, rel=0.05)


def test_beta_mle_recovers_params():
    x = np.random.default_rng(3).beta(2.0, 5.0, 20000)
    fit = stats.fit_beta(x)
    assert fit.converged
    assert fit.params == pytest.approx((2.0, 5.0), rel=0.05)


def test_beta_outside_unit_interval_fails():
    fit = stats.fit_beta(np.linspace(0.5, 1.5, 50))
    assert not fit.converged and math.isinf(fit.aic)


def test_failed_fits_rank_last():
    x = np.random.default_rng(4).normal(0, 1, 100)
    fits = stats.fit_all(x)
    flags = [f.converged for f in fits]
    assert flags == sorted(flags, reverse=True)
    assert fits[0].family == "normal"


def test_exponential_rate():
    x = np.random.default_rng(5).exponential(0.25, 5000)
    assert stats.fit_exponential(x).params[0] == pytest.approx(1 / x.mean())


def test_insufficient_data():
    with pytest.raises(InsufficientDataError):
        stats.fit_all(np.ones(29))


def test_lognormal_selected():
    x = np.random.default_rng(6).lognormal(0.0, 0.5, 2000)
    assert stats.best_family(x) == "lognormal"


def test_fit_table(tmp_path):
    x = np.random.default_rng(7).lognormal(0.0, 0.5, 200)
    stats.write_fit_table(stats.fit_all(x), tmp_path / "fit.csv")
    rows = list(csv.DictReader(open(tmp_path / "fit.csv")))
    assert list(rows[0]) == ["family", "param1", "param2", "loglik", "aic", "rank"]
    assert rows[0]["rank"] == "1" and rows[0]["family"] == "lognormal"


def test_uniform_histogram():
    x = np.random.default_rng(8).uniform(0, 1, 10**6)
    h = stats.hist1d(x, 10)
    assert np.all(np.abs(h.density - 1) <= 0.02)


def test_repeated_value_histogram():
    h = stats.hist1d(np.full(100, 3.0), 5)
    widths = np.diff(h.edges)
    assert np.count_nonzero(h.density) == 1
    assert np.sum(h.density * widths) == pytest.approx(1.0)


def test_empty_histogram():
    with pytest.raises(InsufficientDataError):
        stats.hist1d([])


def test_log_bins():
    h = stats.hist1d(np.random.default_rng(9).lognormal(size=1000), 20, log=True)
    ratios = h.edges[1:] / h.edges[:-1]
    assert np.allclose(ratios, ratios[0])
    with pytest.raises(ValueError):
        stats.hist1d([-1.0, 1.0], 5, log=True)


def test_hist2d_integral():
    rng = np.random.default_rng(10)
    h = stats.hist2d(rng.normal(size=5000), rng.normal(size=5000), 30)
    assert abs(h.integral() - 1.0) <= 1e-9
    assert np.all(h.density >= 0)


def test_ks_cases():
    a = np.random.default_rng(11).normal(size=300)
    assert stats.ks_two_sample(a, a) == 0.0
    assert stats.ks_two_sample([0, 1, 2], [5, 6]) == 1.0
    rng = np.random.default_rng(12)
    assert stats.ks_two_sample(rng.normal(0, 1, 1000), rng.normal(3, 1, 1000)) > 0.8


def test_ks_matches_scipy():
    from scipy.stats import ks_2samp

    rng = np.random.default_rng(13)
    a, b = rng.normal(size=400), rng.normal(0.2, 1.1, size=333)
    assert stats.ks_two_sample(a, b) == pytest.approx(ks_2samp(a, b).statistic)


def test_manifest(tmp_path):
    stats.RunManifest(["a.csv"], eps0=0.1, seeds=[1, 2], flags={"bins": 50}).write(tmp_path / "m.json")
    data = json.loads((tmp_path / "m.json").read_text())
    assert data == {"inputs": ["a.csv"], "eps0": 0.1, "seeds": [1, 2], "flags": {"bins": 50}}


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31), st.integers(0, 2**31))
def test_ranking_invariant_under_permutation(seed, perm_seed):
    x = np.random.default_rng(seed).gamma(2.0, 0.05, 200)
    y = np.random.default_rng(perm_seed).permutation(x)
    assert [(f.family, f.aic) for f in stats.fit_all(x)] == [(f.family, f.aic) for f in stats.fit_all(y)]


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=300), st.integers(2, 40))
def test_hist1d_normalized(samples, bins):
    h = stats.hist1d(samples, bins)
    assert np.all(h.density >= 0)
    assert abs(np.sum(h.density * np.diff(h.edges)) - 1.0) <= 1e-9
