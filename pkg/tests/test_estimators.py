import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from critperc.estimators import (
    EstimationError,
    Estimate,
    EventSpec,
    bootstrap_ratio,
    coupled_ratio,
    evaluate,
    fit_loglog,
    fit_power_law,
    independent_ratio,
    joint_counts,
    mc_probability,
    ratio_from_counts,
    wilson_interval,
)


@pytest.mark.parametrize("p", [0.01, 0.1, 0.5])
def test_wilson_coverage(p):
    rng = np.random.default_rng(1)
    n, reps = 1000, 10_000
    ks = rng.binomial(n, p, size=reps)
    covered = sum(lo <= p <= hi for lo, hi in (wilson_interval(int(k), n) for k in ks))
    assert 0.94 <= covered / reps <= 0.965


def test_wilson_extremes():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0 and 0 < hi < 0.05
    lo, hi = wilson_interval(100, 100)
    assert hi == 1.0 and lo > 0.95


def test_estimate_validation():
    with pytest.raises(EstimationError):
        Estimate(3, 2)
    with pytest.raises(EstimationError):
        Estimate(0, 0)
    with pytest.raises(EstimationError):
        wilson_interval(0, 0)


def test_truncated_counts_only_failures():
    ev = np.array([True, False, False, True])
    tr = np.array([True, True, False, False])
    assert Estimate.from_samples(ev, tr).truncated == 1


def test_identical_spec_ratio_is_one():
    spec = EventSpec("one_arm", mesh=1 / 8, eps=0.5)
    r = coupled_ratio(spec, spec, 5000, seed=3)
    assert r.ratio == 1.0 and r.stderr == 0.0


def test_nested_ratio_at_least_one():
    small = EventSpec("one_arm", mesh=1 / 16, eps=0.25)
    large = EventSpec("one_arm", mesh=1 / 16, eps=0.5)
    assert coupled_ratio(small, large, 5000, seed=3).ratio >= 1.0


def test_coupling_reduces_variance():
    small = EventSpec("one_arm", mesh=1 / 16, eps=0.25)
    large = EventSpec("one_arm", mesh=1 / 16, eps=0.5)
    n = 20_000
    a = evaluate(small, 4, n).event
    b = evaluate(large, 4, n).event
    coupled = ratio_from_counts(joint_counts(a, b))
    indep = independent_ratio(Estimate.from_samples(a), Estimate.from_samples(b))
    assert coupled.stderr <= indep.stderr
    assert coupled.ratio == pytest.approx(indep.ratio)


def test_delta_method_matches_bootstrap():
    counts = (4000, 900, 300, 4800)
    r = ratio_from_counts(counts)
    mean, sd = bootstrap_ratio(counts, n_boot=2000, seed=1)
    assert mean == pytest.approx(r.ratio, rel=0.01)
    assert sd == pytest.approx(r.stderr, rel=0.1)


def test_ratio_zero_denominator():
    with pytest.raises(EstimationError):
        ratio_from_counts((0, 5, 0, 5))


def test_ratio_within():
    r = ratio_from_counts((500, 100, 0, 400))
    assert r.within(1.2, rel=0.0, nsigma=0.1)
    assert r.within(1.3, rel=0.1)
    assert not r.within(2.0, rel=0.1)


def test_exact_power_law_fit():
    x = [1 / 16, 1 / 8, 1 / 4, 1 / 2]
    y = [2.0 * v ** (-1 / 3) for v in x]
    fit = fit_loglog(x, y)
    assert fit.slope == pytest.approx(-1 / 3, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.stderr == pytest.approx(0.0, abs=1e-12)


def test_fit_noise_coverage():
    rng = np.random.default_rng(7)
    x = np.array([1 / 16, 1 / 8, 1 / 4, 1 / 2])
    n = 50_000
    p_true = 0.3 * x ** (-5 / 48) / (1 / 16) ** (-5 / 48)
    covered = 0
    reps = 100
    for _ in range(reps):
        ests = [Estimate(int(rng.binomial(n, p)), n) for p in p_true]
        fit = fit_power_law(list(zip(x, ests)))
        covered += abs(fit.slope + 5 / 48) <= 3 * fit.stderr
    assert covered >= 95


@given(st.floats(0.1, 10.0), st.floats(-2.0, 2.0))
@settings(max_examples=50, deadline=None)
def test_fit_scale_equivariance(c, slope):
    x = np.array([0.1, 0.2, 0.4, 0.8])
    y = np.exp(0.05 * np.sin(7 * x)) * x ** slope
    a = fit_loglog(x, y)
    b = fit_loglog(x, c * y)
    assert b.slope == pytest.approx(a.slope, abs=1e-9)
    d = fit_loglog(3 * x, y)
    assert d.slope == pytest.approx(a.slope, abs=1e-9)


def test_fit_rejections():
    with pytest.raises(EstimationError):
        fit_loglog([1, 2], [1, 2])
    with pytest.raises(EstimationError):
        fit_loglog([1, 2, 3], [1, 0, 2])
    with pytest.raises(EstimationError):
        fit_power_law([(1, Estimate(0, 10)), (2, Estimate(1, 10)), (3, Estimate(2, 10))])


def test_site_event_is_half():
    est = mc_probability(EventSpec("site", mesh=1.0), 100_000, seed=9)
    assert abs(est.z_score(0.5)) < 4


def test_mc_probability_rejects_empty():
    with pytest.raises(EstimationError):
        mc_probability(EventSpec("site", mesh=1.0), 0, seed=0)


@pytest.mark.parametrize("spec", [
    EventSpec("one_arm", mesh=1 / 16, eps=0.25),
    EventSpec("anchored", mesh=1 / 8, z=0.5j),
    EventSpec("images", mesh=1 / 8, z=0.5j),
])
def test_partition_invariance(spec):
    outs = [evaluate(spec, 5, 3000, workers=w).event for w in (1, 4, 16)]
    assert all(np.array_equal(outs[0], o) for o in outs[1:])


def test_offset_windows_concatenate():
    spec = EventSpec("one_arm", mesh=1 / 16, eps=0.25)
    whole = evaluate(spec, 5, 2000).event
    parts = np.concatenate([evaluate(spec, 5, 700, start=0).event,
                            evaluate(spec, 5, 1300, start=700).event])
    assert np.array_equal(whole, parts)
