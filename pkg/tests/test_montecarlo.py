import math

import numpy as np
import pytest

from diffest.errors import ConfigError, UninformativeMeasurementError
from diffest.fisher import MOMENTUM, POSITION, Heterodyne, Homodyne, SldOptimal, homodyne_variance
from diffest.gaussian import SqueezedThermalSpec, evolve_covariance, initial_covariance
from diffest.montecarlo import (
    ExperimentRun,
    mle_lambda,
    ratio_half_width,
    sample_heterodyne,
    sample_homodyne,
    saturation_study,
)

SPEC = SqueezedThermalSpec(1.6)


def test_homodyne_moments():
    theta, tau, lt, n = 0.7, 3.0, 0.4, 400_000
    x = sample_homodyne(theta, SPEC, tau, lt, n, seed=1)
    var = homodyne_variance(theta, SPEC, tau, lt)
    assert abs(x.mean()) < 5 * math.sqrt(var / n)
    # the sample variance has relative sd sqrt(2/n)
    assert np.mean(x * x) == pytest.approx(var, rel=5 * math.sqrt(2 / n))


def test_streams_independent_of_thread_count():
    a = sample_homodyne(0.3, SPEC, 2.0, 1.0, 50_000, seed=5, chunk_size=4096, threads=1)
    b = sample_homodyne(0.3, SPEC, 2.0, 1.0, 50_000, seed=5, chunk_size=4096, threads=4)
    np.testing.assert_array_equal(a, b)
    c = sample_heterodyne(SPEC, 2.0, 1.0, 50_000, seed=5, chunk_size=4096, threads=3)
    d = sample_heterodyne(SPEC, 2.0, 1.0, 50_000, seed=5, chunk_size=4096, threads=1)
    np.testing.assert_array_equal(c, d)


def test_streams_differ_between_replicates_and_seeds():
    a = sample_homodyne(0.3, SPEC, 2.0, 1.0, 100, seed=5, key=(0,))
    assert not np.array_equal(a, sample_homodyne(0.3, SPEC, 2.0, 1.0, 100, seed=5, key=(1,)))
    assert not np.array_equal(a, sample_homodyne(0.3, SPEC, 2.0, 1.0, 100, seed=6, key=(0,)))


def test_chunk_prefix_is_stable():
    # growing n only appends chunks, so earlier outcomes stay fixed
    a = sample_homodyne(0.3, SPEC, 2.0, 1.0, 1000, seed=9, chunk_size=256)
    b = sample_homodyne(0.3, SPEC, 2.0, 1.0, 3000, seed=9, chunk_size=256)
    np.testing.assert_array_equal(a, b[:1000])


def test_heterodyne_covariance_is_sigma_plus_identity():
    tau, lt, n = 4.0, 0.3, 400_000
    spec = SqueezedThermalSpec(1.2, 0.4, 1.1)
    y = sample_heterodyne(spec, tau, lt, n, seed=3)
    expected = evolve_covariance(initial_covariance(spec), tau, lt).as_array() + np.eye(2)
    emp = y.T @ y / n
    scale = np.sqrt(np.outer(np.diag(expected), np.diag(expected)))
    assert np.all(np.abs(emp - expected) < 6 * scale * math.sqrt(2 / n))
    # x and p are positively correlated after free flight
    assert emp[0, 1] > 0


def test_homodyne_mle_inverts_exact_variance():
    theta, tau, lt = 1.2, 5.0, 0.8
    var = homodyne_variance(theta, SPEC, tau, lt)
    # two outcomes +-sqrt(var) have mean square exactly var
    outcomes = np.array([math.sqrt(var), -math.sqrt(var)])
    assert mle_lambda(outcomes, Homodyne(theta), SPEC, tau) == pytest.approx(lt, rel=1e-12, abs=0)


def test_homodyne_mle_clamp():
    tau = 5.0
    tiny = np.full(10, 1e-3)
    assert mle_lambda(tiny, MOMENTUM, SPEC, tau) == 0.0
    assert mle_lambda(tiny, MOMENTUM, SPEC, tau, clamp=False) < 0.0


def test_uninformative_quadrature():
    # with no flight time position picks up no diffusion
    with pytest.raises(UninformativeMeasurementError):
        mle_lambda(np.ones(4), POSITION, SPEC, 0.0)


def test_heterodyne_mle_recovers_truth():
    tau, lt = 10.0, 1.0
    y = sample_heterodyne(SPEC, tau, lt, 200_000, seed=11)
    assert mle_lambda(y, Heterodyne(), SPEC, tau) == pytest.approx(lt, rel=0.05, abs=0)


def test_heterodyne_mle_unclamped_can_go_negative():
    tau = 10.0
    y = sample_heterodyne(SPEC, tau, 0.0, 2000, seed=2)
    free = [mle_lambda(sample_heterodyne(SPEC, tau, 0.0, 2000, seed=s), Heterodyne(), SPEC, tau, clamp=False) for s in range(10)]
    assert min(free) < 0.0
    assert mle_lambda(y, Heterodyne(), SPEC, tau) >= 0.0


def test_no_sampling_model_for_qcrb():
    with pytest.raises(ConfigError):
        mle_lambda(np.ones(4), SldOptimal(), SPEC, 1.0)
    with pytest.raises(ConfigError):
        ExperimentRun(SldOptimal(), SPEC, 1.0, 0.1, 100, seed=0)


@pytest.mark.parametrize("kw", [dict(samples=1), dict(chunk_size=0), dict(true_lambda_tilde=-1.0)])
def test_run_validation(kw):
    base = dict(scheme=MOMENTUM, spec=SPEC, tau=1.0, true_lambda_tilde=0.1, samples=100, seed=0)
    base.update(kw)
    with pytest.raises(ConfigError):
        ExperimentRun(**base)


def test_saturation_is_thread_independent():
    run = ExperimentRun(MOMENTUM, SPEC, 100.0, 0.1, 2000, seed=4)
    a = saturation_study(run, 20, threads=1)
    b = saturation_study(run, 20, threads=4)
    np.testing.assert_array_equal(a.estimates, b.estimates)


def test_homodyne_variance_near_bound():
    run = ExperimentRun(MOMENTUM, SPEC, 1e4, 10 * 1.6 / 1e4, 20_000, seed=7)
    rep = saturation_study(run, 200, threads=4)
    assert rep.estimate_mean == pytest.approx(run.true_lambda_tilde, rel=0.02, abs=0)
    # 200 replicates: the ratio has relative sd 0.1, so allow about 3 sd
    assert 0.7 < rep.saturation_ratio < 1.3
    assert rep.ratio_half_width == pytest.approx(1.96 * rep.saturation_ratio * math.sqrt(2 / 199))


def test_doubling_samples_halves_variance():
    runs = [ExperimentRun(MOMENTUM, SPEC, 1e3, 0.01, n, seed=21) for n in (5_000, 10_000)]
    v1, v2 = (saturation_study(r, 300, threads=4).empirical_variance for r in runs)
    assert v1 / v2 == pytest.approx(2.0, rel=0.3, abs=0)


def test_position_momentum_factor_of_nine():
    # interior truth and no clamping so the estimator is unbiased in both quadratures
    tau, lt = 1e3, 1.6 / (100 * 1e3)
    var = [
        saturation_study(ExperimentRun(s, SPEC, tau, lt, 5_000, seed=8, clamp=False), 400, threads=4).empirical_variance
        for s in (POSITION, MOMENTUM)
    ]
    assert var[0] / var[1] == pytest.approx(9.0, rel=0.25, abs=0)


def test_heterodyne_saturates_its_bound():
    run = ExperimentRun(Heterodyne(), SPEC, 10.0, 1.0, 5_000, seed=13)
    rep = saturation_study(run, 200, threads=4)
    assert 0.7 < rep.saturation_ratio < 1.3


def test_ratio_half_width():
    assert ratio_half_width(1.0, 201) == pytest.approx(1.96 * 0.1)
