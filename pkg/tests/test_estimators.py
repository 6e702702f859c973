"""Unit tests for the static-sampling estimators."""

import math

import numpy as np
import pytest

from pandensity import (
    NoiseSource,
    PrivacyBudget,
    StaticEstimator,
    Variant,
    sample_without_replacement,
)


def make(variant="dwork", universe=1000, m=1000, eps=0.5, seed=0):
    return StaticEstimator(variant, universe, m, PrivacyBudget(eps), seed=seed)


# -- Variant ------------------------------------------------------------------

def test_variant_parse():
    assert Variant.parse("DWORK") is Variant.DWORK
    assert Variant.parse(Variant.PPDS) is Variant.PPDS
    with pytest.raises(ValueError):
        Variant.parse("nope")


# -- sampling -----------------------------------------------------------------

def test_sample_shape_and_range():
    ids = sample_without_replacement(10**6, 5000, NoiseSource(1))
    assert ids.size == 5000
    assert np.unique(ids).size == 5000
    assert ids.min() >= 1 and ids.max() <= 10**6


def test_sample_full_universe():
    ids = sample_without_replacement(100, 100, NoiseSource(1))
    assert np.array_equal(np.sort(ids), np.arange(1, 101))


def test_sample_uniform_marginal():
    # each id appears with probability k/U; chi-square over inclusion counts
    counts = np.zeros(20)
    reps = 3000
    for seed in range(reps):
        counts[sample_without_replacement(20, 5, NoiseSource(seed)) - 1] += 1
    expected = reps * 5 / 20
    chi2 = ((counts - expected) ** 2 / expected).sum()
    # 19 dof, p = 1e-4 cutoff is ~51.6
    assert chi2 < 51.6


def test_sample_rejects_bad_k():
    with pytest.raises(ValueError):
        sample_without_replacement(10, 0, NoiseSource(1))
    with pytest.raises(ValueError):
        sample_without_replacement(10, 11, NoiseSource(1))


# -- construction ---------------------------------------------------------------

def test_init_state_shape():
    est = make(universe=5000, m=300)
    ids, bits = est.snapshot_state()
    assert ids.size == 300 and bits.size == 300
    assert np.unique(ids).size == 300
    assert ids.min() >= 1 and ids.max() <= 5000
    assert set(np.unique(bits)) <= {0, 1}


def test_full_universe_sample():
    est = make(universe=200, m=200)
    assert np.array_equal(np.sort(est.sampled_users), np.arange(1, 201))


def test_dwork_initial_bits_fair():
    # bits are i.i.d.; one wide construction stands in for a seed ensemble
    est = make(universe=10**5, m=10**5)
    assert est.snapshot_state()[1].mean() == pytest.approx(0.5, abs=0.02)


def test_optbern_initial_bits_at_p_init():
    est = make("optbern", universe=10**5, m=10**5)
    assert est.snapshot_state()[1].mean() == pytest.approx(0.3775, abs=0.02)


def test_ppds_variant_rejected():
    with pytest.raises(ValueError):
        make("ppds")


def test_bad_sizes_rejected():
    with pytest.raises(ValueError):
        make(universe=10, m=11)
    with pytest.raises(ValueError):
        make(universe=10, m=0)


# -- observe / delete ------------------------------------------------------------

def test_untracked_observe_is_noop():
    est = make(universe=1000, m=10, seed=2)
    tracked = set(est.sampled_users.tolist())
    before = est.snapshot_state()[1]
    for user in range(1, 1001):
        if user not in tracked:
            est.observe(user)
            est.observe_delete(user)
    assert np.array_equal(est.snapshot_state()[1], before)


def test_observe_redraws_at_p_upd():
    est = make(universe=10**4, m=10**4)
    for user in range(1, 10**4 + 1):
        est.observe(user)
    assert est.snapshot_state()[1].mean() == pytest.approx(0.625, abs=0.02)


def test_repeat_observations_same_marginal():
    # appearing k times leaves the same Bernoulli(p_upd) marginal as once
    once = make(universe=4000, m=4000, seed=5)
    thrice = make(universe=4000, m=4000, seed=6)
    for user in range(1, 4001):
        once.observe(user)
        for _ in range(3):
            thrice.observe(user)
    m1 = once.snapshot_state()[1].mean()
    m3 = thrice.snapshot_state()[1].mean()
    se = math.sqrt(2 * 0.25 / 4000)
    assert abs(m1 - m3) < 4 * se


def test_insert_then_delete_restores_init_marginal():
    est = make(universe=10**4, m=10**4)
    for user in range(1, 10**4 + 1):
        est.observe(user)
        est.observe_delete(user)
    assert est.snapshot_state()[1].mean() == pytest.approx(0.5, abs=0.02)


def test_delete_of_never_observed_keeps_marginal():
    est = make("optbern", universe=10**4, m=10**4)
    for user in range(1, 10**4 + 1):
        est.observe_delete(user)
    assert est.snapshot_state()[1].mean() == pytest.approx(0.3775, abs=0.02)


def test_observe_rejects_out_of_universe():
    est = make(universe=10, m=5)
    for bad in (0, 11, -3):
        with pytest.raises(ValueError):
            est.observe(bad)
        with pytest.raises(ValueError):
            est.observe_delete(bad)


def test_feed_matches_observe_marginal():
    fed = make(universe=4000, m=4000, seed=7)
    fed.feed(np.tile(np.arange(1, 2001), 2))  # 2000 users, twice each
    mean_fed = fed.snapshot_state()[1][np.argsort(fed.sampled_users)][:2000].mean()
    # first 2000 bits (sorted by id) saw updates, expect p_upd
    assert mean_fed == pytest.approx(0.625, abs=0.03)


def test_feed_rejects_out_of_universe():
    est = make(universe=10, m=5)
    with pytest.raises(ValueError):
        est.feed(np.array([1, 11]))
    est.feed(np.array([], dtype=np.int64))  # empty is fine


# -- estimate ----------------------------------------------------------------------

def _with_bits(variant, bits_one, m, eps):
    est = StaticEstimator(variant, m, m, PrivacyBudget(eps), seed=0)
    est._bits = np.array([1] * bits_one + [0] * (m - bits_one), dtype=np.uint8)
    est._src.force_laplace(0.0)
    return est


def test_dwork_estimate_formula():
    est = _with_bits("dwork", 60, 100, 0.5)
    assert est.estimate().value == pytest.approx(0.8, abs=1e-12)


def test_optbern_estimate_formula():
    # (0.6 - 0.5 + tanh(0.25)/2) / tanh(0.25) at 50 digits
    est = _with_bits("optbern", 60, 100, 0.5)
    assert est.estimate().value == pytest.approx(0.90829881650735965683, rel=1e-14)


def test_optbern_debias_zero_point():
    # a bit mean exactly at p_init debiases to zero
    pair_p_init = 0.5 * (1.0 - math.tanh(0.25))
    t = math.tanh(0.25)
    assert abs((pair_p_init - 0.5 + 0.5 * t) / t) < 1e-15


def test_estimate_metadata_and_noise():
    est = make("optbern", universe=100, m=100, eps=0.2)
    d1 = est.estimate()
    d2 = est.estimate()
    assert d1.variant is Variant.OPTBERN and d1.m == 100 and d1.epsilon == 0.2
    assert d1.value != d2.value  # fresh noise per call


def test_estimate_can_leave_unit_interval():
    est = _with_bits("optbern", 0, 100, 0.5)
    assert est.estimate().value < 0.0


# -- snapshots and determinism ----------------------------------------------------

def test_snapshot_is_a_copy():
    est = make(universe=100, m=100)
    ids, bits = est.snapshot_state()
    ids[:] = -1
    bits[:] = 7
    ids2, bits2 = est.snapshot_state()
    assert ids2.min() >= 1
    assert set(np.unique(bits2)) <= {0, 1}


def test_same_seed_same_estimate():
    vals = []
    for _ in range(2):
        est = make("optbern", universe=1000, m=200, eps=0.3, seed=42)
        est.feed(np.arange(1, 501))
        vals.append(est.estimate().value)
    assert vals[0] == vals[1]


def test_state_ratio_monte_carlo():
    # adjacent streams: one differing user observed vs absent; the per-bit
    # likelihood ratio stays within e^eps up to sampling error
    eps = 0.5
    n = 10**5
    observed = make("optbern", universe=n, m=n, eps=eps, seed=8)
    observed.feed(np.arange(1, n + 1))
    absent = make("optbern", universe=n, m=n, eps=eps, seed=9)
    p1 = observed.snapshot_state()[1].mean()
    p0 = absent.snapshot_state()[1].mean()
    se = 4 * math.sqrt(0.25 / n)
    assert p1 / p0 <= math.exp(eps) * (1 + 4 * se)
    assert (1 - p1) / (1 - p0) >= math.exp(-eps) * (1 - 4 * se)
